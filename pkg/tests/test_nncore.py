"""
Testes unitários para o núcleo numérico (camadas densas, perdas e otimizador).
"""

import numpy as np
import pytest

from src.utils.excecoes import InvalidArgumentError, NumericalError
from src.utils.nncore import (
    Batch,
    DenseLayer,
    dense_backward,
    dense_forward,
    grad_check,
    init_dense_layer,
    init_optimizer_state,
    mae_loss,
    optimizer_step,
    relu,
    relu_grad,
    sigmoid,
    sigmoid_bce,
    softmax,
    softmax_xent,
)


class TestDenseLayer:
    """Testes para DenseLayer e dense_forward."""

    def test_identidade(self):
        """Pesos identidade e bias zero devolvem a entrada."""
        camada = DenseLayer(np.eye(2), np.zeros(2))
        x = np.array([[1.0, 2.0]])
        assert np.array_equal(dense_forward(camada, x), x)

    def test_pesos_zero_devolvem_bias(self):
        """Pesos zero fazem a saída igual ao bias em todas as linhas."""
        camada = DenseLayer(np.zeros((2, 3)), np.array([0.5, -1.0]))
        saida = dense_forward(camada, np.ones((4, 3)))
        assert np.array_equal(saida, np.tile([0.5, -1.0], (4, 1)))

    def test_dimensao_incompativel(self):
        """Entrada com D diferente da camada gera InvalidArgumentError."""
        camada = DenseLayer(np.zeros((2, 3)), np.zeros(2))
        with pytest.raises(InvalidArgumentError):
            dense_forward(camada, np.ones((1, 4)))

    def test_bias_incompativel(self):
        """Bias com tamanho errado é rejeitado na construção."""
        with pytest.raises(InvalidArgumentError):
            DenseLayer(np.zeros((2, 3)), np.zeros(3))

    def test_forma_imutavel(self):
        """Trocar os pesos por uma matriz de outra forma é proibido."""
        camada = DenseLayer(np.zeros((2, 3)), np.zeros(2))
        with pytest.raises(InvalidArgumentError):
            camada.weights = np.zeros((3, 3))
        camada.weights = np.ones((2, 3))
        assert camada.weights.sum() == 6

    def test_inicializacao_uniforme_escalada(self):
        """Pesos ficam em ±√(6/(in+out)) e o bias começa em zero."""
        camada = init_dense_layer(30, 10, np.random.default_rng(0))
        limite = np.sqrt(6.0 / 40)
        assert camada.weights.shape == (10, 30)
        assert camada.weights.dtype == np.float32
        assert np.all(np.abs(camada.weights) <= limite)
        assert np.all(camada.bias == 0)

    def test_backward_formas(self):
        """Gradientes têm as formas de x, W e b."""
        camada = init_dense_layer(5, 3, np.random.default_rng(1), np.float64)
        x = np.random.default_rng(2).normal(size=(4, 5))
        grad_x, grad_w, grad_b = dense_backward(camada, x, np.ones((4, 3)))
        assert grad_x.shape == (4, 5)
        assert grad_w.shape == (3, 5)
        assert grad_b.shape == (3,)
        assert np.allclose(grad_b, 4.0)


class TestAtivacoes:
    """Testes para relu, softmax e sigmoide."""

    def test_relu_e_subgradiente_em_zero(self):
        """ReLU zera negativos; o subgradiente em 0 é 0."""
        x = np.array([-1.0, 0.0, 2.0])
        assert np.array_equal(relu(x), [0.0, 0.0, 2.0])
        assert np.array_equal(relu_grad(x), [0.0, 0.0, 1.0])

    def test_softmax_soma_um(self):
        """Cada linha do softmax soma 1, mesmo com logits grandes."""
        p = softmax(np.array([[1000.0, 1000.0], [0.0, -1000.0]]))
        assert np.allclose(p.sum(axis=1), 1.0)
        assert np.allclose(p[0], [0.5, 0.5])

    def test_sigmoide_estavel(self):
        """Sigmoide não gera NaN nos extremos."""
        s = sigmoid(np.array([-1000.0, 0.0, 1000.0]))
        assert np.all(np.isfinite(s))
        assert np.allclose(s, [0.0, 0.5, 1.0])


class TestPerdas:
    """Testes para as três famílias de perda."""

    def test_softmax_xent_logits_iguais(self):
        """Logits iguais com K classes dão perda ln K."""
        perda, _ = softmax_xent(np.zeros((3, 4)), np.array([0, 1, 3]))
        assert perda == pytest.approx(np.log(4), rel=1e-12)

    def test_softmax_xent_confiante(self):
        """Logit muito alto na classe correta dá perda próxima de zero."""
        perda, _ = softmax_xent(np.array([[100.0, 0.0, 0.0]]), np.array([0]))
        assert 0 <= perda < 1e-6

    def test_softmax_xent_alvo_fora(self):
        """Alvo fora de [0, K) é rejeitado."""
        with pytest.raises(InvalidArgumentError):
            softmax_xent(np.zeros((1, 3)), np.array([3]))

    def test_softmax_xent_gradiente_soma_zero(self):
        """Sem pesos por classe, cada linha do gradiente soma zero."""
        logits = np.random.default_rng(3).normal(size=(5, 4))
        _, grad = softmax_xent(logits, np.array([0, 1, 2, 3, 0]))
        assert np.allclose(grad.sum(axis=1), 0.0)

    def test_softmax_xent_pesos_por_classe(self):
        """Peso zero em uma classe anula a contribuição das suas amostras."""
        logits = np.zeros((2, 2))
        perda, grad = softmax_xent(logits, np.array([0, 1]), np.array([0.0, 1.0]))
        assert perda == pytest.approx(np.log(2) / 2)
        assert np.all(grad[0] == 0)

    def test_bce_logit_zero(self):
        """Logit 0 dá perda ln 2 para qualquer alvo binário."""
        perda, _ = sigmoid_bce(np.zeros((2, 2)), np.array([[0, 1], [1, 1]]))
        assert perda == pytest.approx(np.log(2), rel=1e-12)

    def test_bce_logit_extremo_finito(self):
        """Logit +1000 com alvo 0 tem perda finita."""
        perda, grad = sigmoid_bce(np.array([[1000.0]]), np.array([[0.0]]))
        assert np.isfinite(perda)
        assert perda == pytest.approx(1000.0)
        assert np.all(np.isfinite(grad))

    def test_logits_de_1e4(self):
        """Logits de magnitude 1e4 do lado errado dão perdas finitas e exatas."""
        perda, grad = softmax_xent(np.array([[1e4, -1e4]]), np.array([1]))
        assert perda == pytest.approx(20000.0)
        assert np.all(np.isfinite(grad))
        perda, grad = sigmoid_bce(np.array([[1e4]]), np.array([[0.0]]))
        assert perda == pytest.approx(10000.0)
        assert np.all(np.isfinite(grad))

    def test_mae(self):
        """MAE de [1, 2] contra [0, 4] é 1.5."""
        perda, grad = mae_loss(np.array([1.0, 2.0]), np.array([0.0, 4.0]))
        assert perda == 1.5
        assert np.array_equal(grad, [0.5, -0.5])

    def test_mae_zero(self):
        """Predição igual ao alvo dá perda zero."""
        perda, _ = mae_loss(np.array([[3.0], [4.0]]), np.array([3.0, 4.0]))
        assert perda == 0.0

    def test_mae_vazio(self):
        """Entrada vazia é rejeitada."""
        with pytest.raises(InvalidArgumentError):
            mae_loss(np.array([]), np.array([]))


class TestOtimizador:
    """Testes para optimizer_step."""

    def test_gradiente_zero_sem_momento(self):
        """Gradiente zero com velocidade zero não muda os parâmetros."""
        params = [np.array([1.0, 2.0])]
        estado = init_optimizer_state(params)
        optimizer_step(params, [np.zeros(2)], estado, 0.1, 0.9)
        assert np.array_equal(params[0], [1.0, 2.0])

    def test_passo_unico(self):
        """lr = 0.1, momentum 0, g = 1 move o parâmetro 0.1 para baixo."""
        params = [np.array([1.0])]
        estado = init_optimizer_state(params)
        optimizer_step(params, [np.array([1.0])], estado, 0.1, 0.0)
        assert params[0][0] == pytest.approx(0.9)

    def test_momento_acumula(self):
        """Dois passos com momento 0.9: velocidade 1 e depois 1.9."""
        params = [np.array([0.0])]
        estado = init_optimizer_state(params)
        optimizer_step(params, [np.array([1.0])], estado, 1.0, 0.9)
        optimizer_step(params, [np.array([1.0])], estado, 1.0, 0.9)
        assert estado.velocities[0][0] == pytest.approx(1.9)
        assert params[0][0] == pytest.approx(-2.9)

    def test_lr_zero_bit_a_bit(self):
        """lr = 0 mantém os parâmetros idênticos bit a bit."""
        params = [np.random.default_rng(4).normal(size=(3, 3)).astype(np.float32)]
        copia = params[0].copy()
        estado = init_optimizer_state(params)
        optimizer_step(params, [np.ones((3, 3), dtype=np.float32)], estado, 0.0, 0.9)
        assert params[0].tobytes() == copia.tobytes()

    def test_hiperparametros_invalidos(self):
        """lr negativo ou momento fora de [0, 1) são rejeitados."""
        params = [np.zeros(1)]
        estado = init_optimizer_state(params)
        with pytest.raises(InvalidArgumentError):
            optimizer_step(params, [np.zeros(1)], estado, -0.1, 0.9)
        with pytest.raises(InvalidArgumentError):
            optimizer_step(params, [np.zeros(1)], estado, 0.1, 1.0)

    def test_formas_divergentes(self):
        """Gradiente com forma diferente do parâmetro é rejeitado."""
        params = [np.zeros(2)]
        with pytest.raises(InvalidArgumentError):
            optimizer_step(params, [np.zeros(3)], init_optimizer_state(params), 0.1, 0.0)

    def test_valores_nao_finitos(self):
        """Atualização que produz Inf gera NumericalError."""
        params = [np.array([1e308])]
        with pytest.raises(NumericalError):
            optimizer_step(params, [np.array([-1e308])], init_optimizer_state(params), 10.0, 0.0)


class TestLoteEGradCheck:
    """Testes para Batch e grad_check."""

    def test_lote_vazio(self):
        """Lote sem linhas é rejeitado."""
        with pytest.raises(InvalidArgumentError):
            Batch(np.zeros((0, 3)), [np.zeros(0)])

    def test_lote_alvo_incompativel(self):
        """Alvo com número de linhas diferente é rejeitado."""
        with pytest.raises(InvalidArgumentError):
            Batch(np.zeros((2, 3)), [np.zeros(3)])

    def test_mascara_padrao(self):
        """Sem máscaras, todas as linhas contam como rotuladas."""
        lote = Batch(np.zeros((2, 3)), [np.zeros(2)])
        assert lote.mask(0).tolist() == [True, True]

    def test_grad_check_quadratica(self):
        """f(p) = Σ p² tem gradiente 2p; o erro relativo fica abaixo de 1e-6."""
        p = np.array([0.3, -1.2, 2.0])

        def closure():
            return float(np.sum(p ** 2)), [2 * p]

        assert grad_check(closure, [p]) < 1e-6
        assert np.array_equal(p, [0.3, -1.2, 2.0])

    def test_grad_check_detecta_erro(self):
        """Gradiente analítico errado produz erro relativo grande."""
        p = np.array([1.0, 2.0])

        def closure():
            return float(np.sum(p ** 2)), [p.copy()]

        assert grad_check(closure, [p]) > 0.1
