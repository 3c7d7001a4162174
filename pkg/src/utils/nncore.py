"""
Módulo de álgebra de camadas densas para o motor multitarefa.

Este módulo implementa os passes direto e reverso de uma camada densa, a ativação
retificada, as três famílias de perda (softmax + entropia cruzada, sigmoide +
entropia cruzada binária, erro absoluto médio) com seus gradientes, o otimizador
SGD com momentum e a verificação de gradiente por diferenças finitas.

Todas as funções são puras, exceto optimizer_step, que altera os parâmetros e o
estado recebidos.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import EPSILON_GRAD_CHECK, PISO_ERRO_RELATIVO
from .excecoes import InvalidArgumentError, NumericalError

# Um gradiente por array treinável, na mesma ordem dos parâmetros
GradientBundle = List[np.ndarray]


@dataclass(eq=False)
class DenseLayer:
    """
    Camada densa y = x·Wᵀ + b.

    Attributes:
        weights: Matriz [saída × entrada]
        bias: Vetor [saída]
    """
    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        if self.weights.ndim != 2:
            raise InvalidArgumentError("Pesos da camada densa devem formar uma matriz")
        if self.bias.ndim != 1 or self.bias.shape[0] != self.weights.shape[0]:
            raise InvalidArgumentError(
                f"Bias com forma {self.bias.shape} incompatível com pesos {self.weights.shape}"
            )

    def __setattr__(self, nome, valor):
        # Dimensões são imutáveis depois da construção
        atual = self.__dict__.get(nome)
        if atual is not None and getattr(valor, "shape", None) != atual.shape:
            raise InvalidArgumentError(
                f"Não é permitido trocar '{nome}' de forma {atual.shape} por {getattr(valor, 'shape', None)}"
            )
        object.__setattr__(self, nome, valor)

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    def copy(self) -> "DenseLayer":
        return DenseLayer(self.weights.copy(), self.bias.copy())


@dataclass(eq=False)
class Batch:
    """
    Lote de treinamento.

    Attributes:
        inputs: Matriz [B × D]
        targets: Um bloco de alvos por tarefa (índices de classe, multi-hot ou reais)
        masks: Máscara booleana opcional por tarefa; linhas False não têm rótulo
    """
    inputs: np.ndarray
    targets: List[np.ndarray]
    masks: Optional[List[np.ndarray]] = None

    def __post_init__(self):
        if self.inputs.ndim != 2 or self.inputs.shape[0] < 1:
            raise InvalidArgumentError("Lote deve ter ao menos uma linha de entrada")
        tamanho = self.inputs.shape[0]
        for i, alvo in enumerate(self.targets):
            if alvo.shape[0] != tamanho:
                raise InvalidArgumentError(
                    f"Alvo da tarefa {i} tem {alvo.shape[0]} linhas, esperado {tamanho}"
                )
        if self.masks is not None:
            if len(self.masks) != len(self.targets):
                raise InvalidArgumentError("Número de máscaras difere do número de alvos")
            for i, mascara in enumerate(self.masks):
                if mascara.shape != (tamanho,):
                    raise InvalidArgumentError(f"Máscara da tarefa {i} com forma inválida")

    @property
    def size(self) -> int:
        return self.inputs.shape[0]

    def mask(self, indice: int) -> np.ndarray:
        if self.masks is None:
            return np.ones(self.size, dtype=bool)
        return self.masks[indice]


@dataclass
class OptimizerState:
    """Velocidades do SGD com momentum, uma por parâmetro."""
    velocities: List[np.ndarray] = field(default_factory=list)


def init_dense_layer(in_dim: int, out_dim: int, rng: np.random.Generator,
                     dtype=np.float32) -> DenseLayer:
    """
    Inicializa camada com distribuição uniforme escalada.

    Pesos em [−√(6/(in+out)), +√(6/(in+out))], bias zero.
    """
    if in_dim < 1 or out_dim < 1:
        raise InvalidArgumentError(f"Dimensões inválidas para camada densa: {in_dim}→{out_dim}")
    limite = np.sqrt(6.0 / (in_dim + out_dim))
    pesos = rng.uniform(-limite, limite, size=(out_dim, in_dim)).astype(dtype)
    return DenseLayer(pesos, np.zeros(out_dim, dtype=dtype))


def dense_forward(layer: DenseLayer, x: np.ndarray) -> np.ndarray:
    """
    Passe direto da camada densa: y = x·Wᵀ + b.

    Args:
        layer: Camada densa
        x: Matriz [B × entrada]

    Returns:
        Matriz [B × saída]

    Raises:
        InvalidArgumentError: Se o número de colunas de x diferir da entrada da camada

    Examples:
        >>> camada = DenseLayer(np.array([[1.0, 1.0]]), np.array([1.0]))
        >>> dense_forward(camada, np.array([[2.0, 3.0]]))
        array([[6.]])
    """
    if x.ndim != 2 or x.shape[1] != layer.in_dim:
        raise InvalidArgumentError(
            f"Entrada com forma {x.shape} incompatível com camada de entrada {layer.in_dim}"
        )
    return x @ layer.weights.T + layer.bias


def dense_backward(layer: DenseLayer, x: np.ndarray,
                   grad_y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Passe reverso da camada densa.

    Returns:
        Tupla (grad_x, grad_pesos, grad_bias)
    """
    grad_x = grad_y @ layer.weights
    grad_w = grad_y.T @ x
    grad_b = grad_y.sum(axis=0)
    return grad_x, grad_w, grad_b


def relu(x: np.ndarray) -> np.ndarray:
    """Máximo elemento a elemento entre 0 e x."""
    return np.maximum(x, 0)


def relu_grad(x: np.ndarray) -> np.ndarray:
    """Subgradiente da ReLU: 1 onde x > 0, 0 caso contrário (inclusive em x = 0)."""
    return (x > 0).astype(x.dtype)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Softmax por linha, com subtração do máximo."""
    deslocado = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(deslocado)
    return exp / exp.sum(axis=1, keepdims=True)


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Sigmoide estável: exp(−softplus(−z))."""
    return np.exp(-np.logaddexp(0, -z))


def softmax_xent(logits: np.ndarray, targets: np.ndarray,
                 class_weights: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
    """
    Entropia cruzada categórica com softmax e pesos por classe.

    loss = (1/B)·Σ_b w[t_b]·(−log softmax(z_b)[t_b])

    Args:
        logits: Matriz [B × K]
        targets: Índices de classe [B]
        class_weights: Pesos [K] não negativos (padrão: todos 1)

    Returns:
        Tupla (perda, gradiente [B × K])

    Raises:
        InvalidArgumentError: Se algum alvo estiver fora de [0, K) ou pesos forem negativos
    """
    tamanho, classes = logits.shape
    alvos = np.asarray(targets)
    if alvos.shape != (tamanho,):
        raise InvalidArgumentError(f"Esperados {tamanho} alvos, recebidos {alvos.shape}")
    if tamanho and (alvos.min() < 0 or alvos.max() >= classes):
        raise InvalidArgumentError(f"Alvo fora do intervalo [0, {classes})")
    if class_weights is None:
        pesos = np.ones(classes, dtype=logits.dtype)
    else:
        pesos = np.asarray(class_weights, dtype=logits.dtype)
        if pesos.shape != (classes,) or np.any(pesos < 0):
            raise InvalidArgumentError("Pesos por classe devem ser não negativos e ter K entradas")

    deslocado = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(deslocado).sum(axis=1, keepdims=True))
    log_prob = deslocado - log_norm

    linhas = np.arange(tamanho)
    pesos_amostra = pesos[alvos]
    perda = float(np.sum(pesos_amostra * -log_prob[linhas, alvos]) / tamanho)

    grad = np.exp(log_prob)
    grad[linhas, alvos] -= 1
    grad *= (pesos_amostra / tamanho)[:, None]
    return perda, grad


def sigmoid_bce(logits: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Entropia cruzada binária com sigmoide, média sobre B·K.

    Usa a forma softplus(z) − t·z, estável para |z| grande.

    Returns:
        Tupla (perda, gradiente (σ(z) − t)/(B·K))
    """
    alvos = np.asarray(targets, dtype=logits.dtype)
    if alvos.shape != logits.shape:
        raise InvalidArgumentError(f"Alvos {alvos.shape} incompatíveis com logits {logits.shape}")
    total = logits.size
    perda = float(np.sum(np.logaddexp(0, logits) - alvos * logits) / total)
    grad = (sigmoid(logits) - alvos) / total
    return perda, grad


def mae_loss(pred: np.ndarray, target: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Erro absoluto médio.

    Args:
        pred: Predições [B] (ou [B × 1])
        target: Alvos [B]

    Returns:
        Tupla (perda, gradiente sign(p − t)/B com a forma de pred)

    Raises:
        InvalidArgumentError: Se a entrada for vazia ou os tamanhos diferirem
    """
    p = np.asarray(pred)
    valores = p.reshape(-1)
    alvos = np.asarray(target, dtype=valores.dtype).reshape(-1)
    if valores.size == 0:
        raise InvalidArgumentError("Erro absoluto médio indefinido para entrada vazia")
    if valores.shape != alvos.shape:
        raise InvalidArgumentError(f"Tamanhos diferentes: {valores.shape} e {alvos.shape}")
    diferenca = valores - alvos
    perda = float(np.sum(np.abs(diferenca)) / valores.size)
    grad = (np.sign(diferenca) / valores.size).reshape(p.shape)
    return perda, grad


def init_optimizer_state(params: Sequence[np.ndarray]) -> OptimizerState:
    """Cria velocidades zeradas com a forma de cada parâmetro."""
    return OptimizerState([np.zeros_like(p) for p in params])


def optimizer_step(params: Sequence[np.ndarray], grads: GradientBundle, state: OptimizerState,
                   lr: float, momentum: float) -> Tuple[Sequence[np.ndarray], OptimizerState]:
    """
    Passo de SGD com momentum clássico (altera params e state no lugar).

    v ← momentum·v + g;  p ← p − lr·v

    Args:
        params: Arrays de parâmetros
        grads: Gradientes com as mesmas formas
        state: Velocidades
        lr: Taxa de aprendizado (lr = 0 mantém os parâmetros idênticos bit a bit)
        momentum: Coeficiente em [0, 1)

    Returns:
        Tupla (params, state) atualizados

    Raises:
        InvalidArgumentError: Para hiperparâmetros fora do domínio ou formas divergentes
        NumericalError: Se a atualização produzir valores não finitos
    """
    if lr < 0:
        raise InvalidArgumentError(f"Taxa de aprendizado deve ser não negativa, recebido {lr}")
    if not 0 <= momentum < 1:
        raise InvalidArgumentError(f"Momentum deve estar em [0, 1), recebido {momentum}")
    if len(params) != len(grads) or len(params) != len(state.velocities):
        raise InvalidArgumentError("Número de parâmetros, gradientes e velocidades difere")
    for p, g, v in zip(params, grads, state.velocities):
        if p.shape != g.shape or p.shape != v.shape:
            raise InvalidArgumentError(f"Formas divergentes: parâmetro {p.shape}, gradiente {g.shape}")

    for p, g, v in zip(params, grads, state.velocities):
        v *= momentum
        v += g.astype(v.dtype, copy=False)
        if lr == 0:
            continue
        p -= lr * v
        if not np.all(np.isfinite(p)):
            raise NumericalError("Parâmetros não finitos após passo do otimizador")
    return params, state


def grad_check(closure: Callable[[], Tuple[float, GradientBundle]], params: Sequence[np.ndarray],
               epsilon: float = EPSILON_GRAD_CHECK) -> float:
    """
    Compara o gradiente analítico com diferenças centrais em cada coordenada.

    A closure deve ler os próprios arrays de params (que são perturbados no lugar
    e restaurados) e devolver (perda, gradientes).

    Args:
        closure: Função determinística sem argumentos
        params: Arrays lidos pela closure
        epsilon: Passo da diferença central

    Returns:
        Máximo de |g_a − g_n| / max(1e-12, |g_a| + |g_n|) sobre todas as coordenadas
    """
    if epsilon <= 0:
        raise InvalidArgumentError("Epsilon deve ser positivo")
    _, analiticos = closure()
    analiticos = [np.array(g, dtype=np.float64, copy=True) for g in analiticos]

    pior = 0.0
    for p, g_analitico in zip(params, analiticos):
        plano = p.reshape(-1)
        grad_plano = g_analitico.reshape(-1)
        for i in range(plano.size):
            original = plano[i]
            plano[i] = original + epsilon
            perda_mais, _ = closure()
            plano[i] = original - epsilon
            perda_menos, _ = closure()
            plano[i] = original

            numerico = (perda_mais - perda_menos) / (2 * epsilon)
            diferenca = abs(grad_plano[i] - numerico)
            escala = max(PISO_ERRO_RELATIVO, abs(grad_plano[i]) + abs(numerico))
            pior = max(pior, diferenca / escala)
    return float(pior)
