"""
Testes de propriedade para o modelo multitarefa.

Valida com hypothesis a exatidão e a homogeneidade da perda combinada, a
economia de operações do tronco compartilhado e a ida e volta dos checkpoints.
"""

import shutil
import tempfile
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

from src.utils.model import (
    TaskSpec,
    build_model,
    combined_loss,
    compute_gradients,
    flop_count,
    load_checkpoint,
    save_checkpoint,
    single_task_flop_count,
)
from src.utils.nncore import Batch

TIPOS = ["multiclass", "multilabel", "regression"]


@st.composite
def perdas_ponderadas(draw):
    """Gera perdas, pesos e escalas para n tarefas."""
    n = draw(st.integers(min_value=1, max_value=6))
    perdas = draw(st.lists(st.floats(min_value=0.0, max_value=100.0), min_size=n, max_size=n))
    pesos = draw(st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=n, max_size=n))
    escalas = draw(st.lists(st.floats(min_value=1e-3, max_value=10.0), min_size=n, max_size=n))
    return perdas, pesos, escalas


@st.composite
def arquiteturas(draw):
    """Gera dimensões e tarefas de um modelo pequeno."""
    D = draw(st.integers(min_value=1, max_value=12))
    H = draw(st.integers(min_value=1, max_value=10))
    n = draw(st.integers(min_value=1, max_value=4))
    specs = []
    for i in range(n):
        tipo = draw(st.sampled_from(TIPOS))
        K = 1 if tipo == "regression" else draw(st.integers(min_value=1 if tipo == "multilabel" else 2,
                                                            max_value=6))
        specs.append(TaskSpec(f"task_{i}", tipo, K))
    return D, H, specs


class TestPropriedadesModelo:
    """Propriedades do modelo multitarefa."""

    @given(perdas_ponderadas())
    @settings(max_examples=100)
    def test_perda_combinada_exata(self, entrada):
        """L_t = Σ w_i·s_i·L_i com erro relativo abaixo de 1e-9."""
        perdas, pesos, escalas = entrada
        specs = [TaskSpec(f"t{i}", "multiclass", 2, w, s) for i, (w, s) in enumerate(zip(pesos, escalas))]
        decomposicao, _ = combined_loss([(l, np.zeros((1, 2))) for l in perdas], specs)
        esperado = sum(w * s * l for w, s, l in zip(pesos, escalas, perdas))
        assert abs(decomposicao.total - esperado) <= 1e-9 * max(1.0, abs(esperado))

    @given(st.integers(min_value=0, max_value=10_000), st.floats(min_value=0.1, max_value=10.0))
    @settings(max_examples=100, deadline=None)
    def test_homogeneidade_nos_pesos(self, semente, c):
        """Multiplicar todos os pesos por c multiplica L_t e os gradientes por c."""
        rng = np.random.default_rng(semente)
        specs = [TaskSpec("a", "multiclass", 3, 0.5), TaskSpec("b", "multilabel", 2, 1.5),
                 TaskSpec("c", "regression", 1, 1.0, 0.1)]
        modelo = build_model(4, 3, specs, seed=semente, dtype=np.float64)
        lote = Batch(rng.normal(size=(4, 4)),
                     [rng.integers(0, 3, size=4), (rng.random((4, 2)) < 0.5).astype(np.float64),
                      rng.normal(size=4)])
        base, grads_base = compute_gradients(modelo, lote)

        modelo.task_specs = [s.with_weight_scale(s.weight * c, s.scale) for s in modelo.task_specs]
        escalado, grads_escalados = compute_gradients(modelo, lote)

        assert abs(escalado.total - c * base.total) <= 1e-9 * max(1.0, abs(c * base.total))
        for g, ge in zip(grads_base, grads_escalados):
            assert np.allclose(ge, c * g, rtol=1e-9, atol=1e-15)

    @given(arquiteturas(), st.integers(min_value=1, max_value=64))
    @settings(max_examples=100, deadline=None)
    def test_economia_do_tronco(self, arquitetura, B):
        """Σ custos isolados − custo conjunto = (n − 1)·B·D·H."""
        D, H, specs = arquitetura
        modelo = build_model(D, H, specs, seed=0)
        isolados = sum(single_task_flop_count(modelo, i, B) for i in range(len(specs)))
        assert isolados - flop_count(modelo, B=B) == (len(specs) - 1) * B * D * H

    @given(arquiteturas(), st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=30, deadline=None)
    def test_checkpoint_bit_a_bit(self, arquitetura, semente):
        """Qualquer arquitetura é gravada e carregada bit a bit."""
        D, H, specs = arquitetura
        modelo = build_model(D, H, specs, seed=semente)
        temp_dir = tempfile.mkdtemp()
        try:
            caminho = Path(temp_dir) / "modelo.omtl"
            save_checkpoint(modelo, caminho)
            carregado = load_checkpoint(caminho)
            assert carregado.task_names == modelo.task_names
            for a, b in zip(modelo.parameters(), carregado.parameters()):
                assert a.shape == b.shape
                assert a.tobytes() == b.tobytes()
        finally:
            shutil.rmtree(temp_dir, ignore_errors=True)
