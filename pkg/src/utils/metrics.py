"""
Módulo de métricas das tarefas.

Acurácia top-k, MAP por amostra (e por rótulo, opcional), erro absoluto médio em
anos, acurácia por intervalo de ±50 anos e matrizes de confusão com a diagonal
principal subtraída. Empates de pontuação são sempre resolvidos pelo menor id de
classe.
"""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ..config import TOLERANCIA_PERIODO_ANOS
from .excecoes import FormatError, InvalidArgumentError, UndefinedMetricError
from .validacao import validar_estrutura_relatorio

Caminho = Union[str, Path]


def _ranking(scores: np.ndarray) -> np.ndarray:
    # Ordem decrescente de pontuação; ordenação estável mantém o menor id primeiro
    return np.argsort(-scores, axis=1, kind="stable")


@dataclass
class ConfusionMatrix:
    """
    Matriz de confusão (linhas = classe verdadeira, colunas = prevista).

    Attributes:
        counts: Matriz K × K de inteiros não negativos
        labels: Rótulo de cada classe
    """
    counts: np.ndarray
    labels: List[str]

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 2 or self.counts.shape[0] != self.counts.shape[1]:
            raise InvalidArgumentError(f"Matriz de confusão deve ser quadrada: {self.counts.shape}")
        if np.any(self.counts < 0):
            raise InvalidArgumentError("Matriz de confusão com contagem negativa")
        if len(self.labels) != self.counts.shape[0]:
            raise InvalidArgumentError("Número de rótulos difere da dimensão da matriz")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def trace(self) -> int:
        return int(np.trace(self.counts))

    def to_dict(self) -> Dict[str, Any]:
        return {"labels": list(self.labels), "counts": self.counts.tolist()}

    @classmethod
    def from_dict(cls, dados: Dict[str, Any]) -> "ConfusionMatrix":
        return cls(np.array(dados["counts"], dtype=np.int64), list(dados["labels"]))

    def to_csv(self, path: Caminho) -> None:
        """Grava CSV com linha de cabeçalho de rótulos; a primeira coluna é o rótulo verdadeiro."""
        with open(path, 'w', encoding='utf-8', newline='') as f:
            escritor = csv.writer(f)
            escritor.writerow([""] + list(self.labels))
            for rotulo, linha in zip(self.labels, self.counts):
                escritor.writerow([rotulo] + [int(v) for v in linha])

    @classmethod
    def from_csv(cls, path: Caminho) -> "ConfusionMatrix":
        caminho = Path(path)
        if not caminho.exists():
            raise FileNotFoundError(f"Arquivo de confusão não encontrado: {caminho}")
        with open(caminho, 'r', encoding='utf-8', newline='') as f:
            linhas = list(csv.reader(f))
        if not linhas or len(linhas[0]) < 2:
            raise FormatError("CSV de confusão sem cabeçalho de rótulos", linha=1)
        rotulos = linhas[0][1:]
        contagens = []
        for numero, linha in enumerate(linhas[1:], 2):
            if len(linha) != len(rotulos) + 1:
                raise FormatError(f"Esperadas {len(rotulos) + 1} colunas, encontradas {len(linha)}",
                                  linha=numero)
            try:
                contagens.append([int(v) for v in linha[1:]])
            except ValueError:
                raise FormatError("Contagem não inteira", linha=numero)
        if len(contagens) != len(rotulos):
            raise FormatError(f"Esperadas {len(rotulos)} linhas de contagem, encontradas {len(contagens)}")
        try:
            return cls(np.array(contagens, dtype=np.int64).reshape(len(rotulos), len(rotulos)), rotulos)
        except InvalidArgumentError as e:
            raise FormatError(str(e))


@dataclass
class MetricsReport:
    """
    Relatório de métricas de uma partição.

    Attributes:
        split: Partição avaliada
        n_samples: Número de amostras avaliadas
        tasks: Por tarefa, nome da métrica -> valor (None quando indefinida)
        confusion_matrices: Matrizes das tarefas multiclass
    """
    split: str
    n_samples: int
    tasks: Dict[str, Dict[str, Optional[float]]] = field(default_factory=dict)
    confusion_matrices: Dict[str, ConfusionMatrix] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "split": self.split,
            "n_samples": self.n_samples,
            "tasks": {t: dict(m) for t, m in self.tasks.items()},
            "confusion_matrices": {t: cm.to_dict() for t, cm in self.confusion_matrices.items()},
        }

    @classmethod
    def from_dict(cls, dados: Dict[str, Any]) -> "MetricsReport":
        valido, erros = validar_estrutura_relatorio(dados)
        if not valido:
            raise FormatError(f"Relatório de métricas inválido: {'; '.join(erros)}")
        return cls(dados["split"], int(dados["n_samples"]),
                   {t: dict(m) for t, m in dados["tasks"].items()},
                   {t: ConfusionMatrix.from_dict(cm) for t, cm in dados["confusion_matrices"].items()})

    def save(self, path: Caminho) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)
            f.write("\n")

    @classmethod
    def load(cls, path: Caminho) -> "MetricsReport":
        with open(path, 'r', encoding='utf-8') as f:
            return cls.from_dict(json.load(f))


def topk_accuracy(scores: np.ndarray, truth: np.ndarray, k: int) -> float:
    """
    Fração de linhas em que a classe verdadeira está entre as k maiores pontuações.

    Raises:
        InvalidArgumentError: k fora de [1, K] ou formas incompatíveis

    Examples:
        >>> topk_accuracy(np.array([[0.1, 0.9]]), np.array([1]), 1)
        1.0
    """
    pontuacoes = np.asarray(scores)
    verdade = np.asarray(truth)
    if pontuacoes.ndim != 2 or verdade.shape != (pontuacoes.shape[0],):
        raise InvalidArgumentError("Formas incompatíveis entre pontuações e classes verdadeiras")
    if not 1 <= k <= pontuacoes.shape[1]:
        raise InvalidArgumentError(f"k deve estar em [1, {pontuacoes.shape[1]}], recebido {k}")
    if pontuacoes.shape[0] == 0:
        raise UndefinedMetricError("Acurácia indefinida sem amostras")
    melhores = _ranking(pontuacoes)[:, :k]
    return float(np.mean(np.any(melhores == verdade[:, None], axis=1)))


def _precisao_media(pontuacoes: np.ndarray, verdade: np.ndarray) -> float:
    ordem = np.argsort(-pontuacoes, kind="stable")
    acertos = verdade[ordem] > 0
    posicoes = np.flatnonzero(acertos) + 1
    return float(np.mean(np.arange(1, len(posicoes) + 1) / posicoes))


def sample_map(scores: np.ndarray, truth: np.ndarray) -> float:
    """
    MAP por amostra: precisão média da lista ordenada de rótulos de cada amostra,
    média sobre as amostras com ao menos um rótulo positivo.

    Raises:
        UndefinedMetricError: Nenhuma linha com rótulo positivo

    Examples:
        >>> round(sample_map(np.array([[3, 2, 1]]), np.array([[1, 0, 1]])), 4)
        0.8333
    """
    pontuacoes = np.asarray(scores)
    verdade = np.asarray(truth)
    if pontuacoes.shape != verdade.shape or pontuacoes.ndim != 2:
        raise InvalidArgumentError("Pontuações e rótulos multi-hot devem ter a mesma forma")
    valores = [_precisao_media(p, v) for p, v in zip(pontuacoes, verdade) if np.any(v > 0)]
    if not valores:
        raise UndefinedMetricError("MAP indefinido: nenhuma amostra com rótulo positivo")
    return float(np.mean(valores))


def label_map(scores: np.ndarray, truth: np.ndarray) -> float:
    """MAP por rótulo (macro): precisão média de cada coluna com algum positivo."""
    pontuacoes = np.asarray(scores)
    verdade = np.asarray(truth)
    if pontuacoes.shape != verdade.shape or pontuacoes.ndim != 2:
        raise InvalidArgumentError("Pontuações e rótulos multi-hot devem ter a mesma forma")
    valores = [_precisao_media(pontuacoes[:, j], verdade[:, j])
               for j in range(verdade.shape[1]) if np.any(verdade[:, j] > 0)]
    if not valores:
        raise UndefinedMetricError("MAP por rótulo indefinido: nenhum rótulo com positivos")
    return float(np.mean(valores))


def mae_years(pred_std: np.ndarray, truth_std: np.ndarray, train_mean: float, train_std: float) -> float:
    """
    Erro absoluto médio em anos a partir de valores padronizados.

    Raises:
        InvalidArgumentError: train_std ≤ 0 ou vetores de tamanhos diferentes
    """
    if not train_std > 0:
        raise InvalidArgumentError(f"Desvio de treino deve ser positivo, recebido {train_std}")
    previsto = np.asarray(pred_std, dtype=np.float64).reshape(-1)
    verdade = np.asarray(truth_std, dtype=np.float64).reshape(-1)
    if previsto.shape != verdade.shape:
        raise InvalidArgumentError("Previsões e verdades com tamanhos diferentes")
    if previsto.size == 0:
        raise UndefinedMetricError("MAE indefinido sem amostras")
    anos_previstos = previsto * train_std + train_mean
    anos_verdadeiros = verdade * train_std + train_mean
    return float(np.mean(np.abs(anos_previstos - anos_verdadeiros)))


def interval_accuracy(pred_years: np.ndarray, truth_years: np.ndarray,
                      tolerance: float = TOLERANCIA_PERIODO_ANOS) -> float:
    """
    Fração de previsões com |previsto − verdadeiro| ≤ tolerância (intervalo fechado).

    Examples:
        >>> interval_accuracy(np.array([1600.0]), np.array([1635.0]))
        1.0
    """
    previsto = np.asarray(pred_years, dtype=np.float64).reshape(-1)
    verdade = np.asarray(truth_years, dtype=np.float64).reshape(-1)
    if previsto.shape != verdade.shape:
        raise InvalidArgumentError("Previsões e verdades com tamanhos diferentes")
    if previsto.size == 0:
        raise UndefinedMetricError("Acurácia por intervalo indefinida sem amostras")
    return float(np.mean(np.abs(previsto - verdade) <= tolerance))


def confusion_matrix(pred: np.ndarray, truth: np.ndarray, K: int,
                     labels: Optional[Sequence[str]] = None) -> ConfusionMatrix:
    """
    Conta counts[verdadeiro][previsto] para cada amostra.

    Raises:
        InvalidArgumentError: Índice fora de [0, K)

    Examples:
        >>> confusion_matrix(np.array([1, 0]), np.array([0, 0]), 2).counts.tolist()
        [[1, 1], [0, 0]]
    """
    previsto = np.asarray(pred, dtype=np.int64).reshape(-1)
    verdade = np.asarray(truth, dtype=np.int64).reshape(-1)
    if previsto.shape != verdade.shape:
        raise InvalidArgumentError("Previsões e verdades com tamanhos diferentes")
    if K < 1:
        raise InvalidArgumentError(f"K deve ser ao menos 1, recebido {K}")
    if np.any((previsto < 0) | (previsto >= K) | (verdade < 0) | (verdade >= K)):
        raise InvalidArgumentError(f"Índice de classe fora de [0, {K})")
    contagens = np.zeros((K, K), dtype=np.int64)
    np.add.at(contagens, (verdade, previsto), 1)
    rotulos = list(labels) if labels is not None else [str(i) for i in range(K)]
    return ConfusionMatrix(contagens, rotulos)


def confusion_offdiagonal(cm: ConfusionMatrix) -> ConfusionMatrix:
    """Cópia da matriz com a diagonal principal zerada."""
    contagens = cm.counts.copy()
    np.fill_diagonal(contagens, 0)
    return ConfusionMatrix(contagens, list(cm.labels))
