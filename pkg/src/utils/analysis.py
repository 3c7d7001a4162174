"""
Módulo de análise de entrelaçamento entre tarefas.

Estima probabilidades condicionais P(T1 | T2, T3) a partir das co-ocorrências de
rótulos nos metadados, ordena os pares de confusão mais frequentes, mede a
dependência entre tarefas (informação mútua, entropia condicional) e exporta as
ativações da camada compartilhada como novas características.
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import LARGURA_BIN_PERIODO, TAREFAS
from .data import FeatureDataset, labels_of, resolve_period, stem_material_label, write_feature_matrix
from .excecoes import InvalidArgumentError, UndefinedProbabilityError
from .metrics import ConfusionMatrix
from .model import MultiTaskModel
from .nncore import dense_forward, relu
from .normalizacao import eh_rotulo_excluido, encontrar_rotulo_similar, normalizar_rotulo

Rotulo = Union[str, int]
Tripla = Tuple[Rotulo, Rotulo, Rotulo]

# "generative_period" lê o ano médio do artista gravado pelo gerador sintético
CAMPOS_PERIODO = ("period", "generative_period")
CAMPOS_ANALISE = tuple(TAREFAS) + ("generative_period",)


def bin_period(ano: float, largura: int = LARGURA_BIN_PERIODO) -> int:
    """
    Início da faixa de anos que contém o ano.

    Examples:
        >>> bin_period(1635)
        1625
        >>> bin_period(-10)
        -25
    """
    if largura < 1:
        raise InvalidArgumentError(f"Largura da faixa deve ser ao menos 1, recebido {largura}")
    return int(math.floor(ano / largura) * largura)


def valores_campo(registro: Dict[str, Any], campo: str, largura: int = LARGURA_BIN_PERIODO) -> List[Rotulo]:
    """Rótulos de um campo de análise em um registro (lista vazia se ausente)."""
    if campo == "period":
        if registro.get("period") is None:
            return []
        return [bin_period(resolve_period(registro["period"]), largura)]
    if campo == "generative_period":
        gerativo = registro.get("generative") or {}
        if gerativo.get("artist_mean_year") is None:
            return []
        return [bin_period(float(gerativo["artist_mean_year"]), largura)]
    if campo not in TAREFAS:
        raise InvalidArgumentError(f"Campo de análise desconhecido '{campo}'; opções: {', '.join(CAMPOS_ANALISE)}")
    return [r for r in labels_of(registro, campo) if not eh_rotulo_excluido(r)]


def converter_valor(campo: str, texto: str, largura: int = LARGURA_BIN_PERIODO) -> Rotulo:
    """
    Converte o valor de uma consulta para a forma usada na tabela.

    Examples:
        >>> converter_valor("period", "1635")
        1625
        >>> converter_valor("material", "Papers")
        'paper'
    """
    if campo in CAMPOS_PERIODO:
        try:
            return bin_period(resolve_period(texto), largura)
        except InvalidArgumentError:
            raise InvalidArgumentError(f"Valor de período inválido na consulta: '{texto}'")
    if campo == "material":
        return stem_material_label(texto)
    return normalizar_rotulo(texto)


@dataclass
class CooccurrenceTable:
    """
    Contagens conjuntas de triplas de rótulos (T1, T2, T3).

    Attributes:
        fields: Campos de T1, T2 e T3
        joint: Tripla -> contagem
        bin_width: Largura das faixas de período
    """
    fields: Tuple[str, str, str]
    joint: Dict[Tripla, int] = field(default_factory=dict)
    bin_width: int = LARGURA_BIN_PERIODO

    def __post_init__(self):
        if any(c < 0 for c in self.joint.values()):
            raise InvalidArgumentError("Contagens de co-ocorrência devem ser não negativas")
        self.joint = {tripla: int(c) for tripla, c in self.joint.items() if c > 0}
        self._terceiro: Counter = Counter()
        self._segundo_terceiro: Counter = Counter()
        self._primeiro: Counter = Counter()
        self._segundo: Counter = Counter()
        for (t1, t2, t3), contagem in self.joint.items():
            self._terceiro[t3] += contagem
            self._segundo[t2] += contagem
            self._segundo_terceiro[(t2, t3)] += contagem
            self._primeiro[t1] += contagem

    @property
    def total(self) -> int:
        return sum(self.joint.values())

    def count(self, t1: Rotulo, t2: Rotulo, t3: Rotulo) -> int:
        return self.joint.get((t1, t2, t3), 0)

    def count_third(self, t3: Rotulo) -> int:
        return self._terceiro.get(t3, 0)

    def count_second(self, t2: Rotulo) -> int:
        return self._segundo.get(t2, 0)

    def count_second_third(self, t2: Rotulo, t3: Rotulo) -> int:
        return self._segundo_terceiro.get((t2, t3), 0)

    def count_first(self, t1: Rotulo) -> int:
        return self._primeiro.get(t1, 0)

    def values(self, posicao: int) -> List[Rotulo]:
        """Rótulos distintos de T1 (0), T2 (1) ou T3 (2), ordenados."""
        return sorted({tripla[posicao] for tripla in self.joint}, key=lambda v: (str(type(v)), v))

    def pairs(self) -> List[Tuple[Rotulo, Rotulo]]:
        """Pares (t2, t3) com contagem positiva, ordenados."""
        return sorted(self._segundo_terceiro,
                      key=lambda p: (str(type(p[0])), p[0], str(type(p[1])), p[1]))


def build_cooccurrence_table(records: Iterable[Dict[str, Any]],
                             fields: Sequence[str] = ("artist", "period", "material"),
                             bin_width: int = LARGURA_BIN_PERIODO) -> CooccurrenceTable:
    """
    Conta as triplas de rótulos dos registros.

    Campos multilabel contribuem com uma tripla por rótulo; registros sem algum
    dos campos são ignorados.

    Raises:
        InvalidArgumentError: Número de campos diferente de 3 ou campo desconhecido
    """
    campos = tuple(fields)
    if len(campos) != 3:
        raise InvalidArgumentError(f"São necessários exatamente três campos, recebidos {len(campos)}")
    for campo in campos:
        if campo not in CAMPOS_ANALISE:
            raise InvalidArgumentError(f"Campo de análise desconhecido '{campo}'")

    contagens: Counter = Counter()
    for registro in records:
        valores = [valores_campo(registro, campo, bin_width) for campo in campos]
        for t1 in valores[0]:
            for t2 in valores[1]:
                for t3 in valores[2]:
                    contagens[(t1, t2, t3)] += 1
    return CooccurrenceTable(campos, dict(contagens), bin_width)


def conditional_probability(table: CooccurrenceTable, t1: Rotulo, t2: Rotulo, t3: Rotulo) -> float:
    """
    P(T1 = t1 | T2 = t2, T3 = t3) = contagem(t1, t2, t3) / contagem(t2, t3).

    Raises:
        UndefinedProbabilityError: Contagem condicionante nula

    Examples:
        >>> tabela = CooccurrenceTable(("artist", "period", "material"),
        ...                            {("A", 1600, "oil"): 2, ("B", 1600, "oil"): 2})
        >>> conditional_probability(tabela, "A", 1600, "oil")
        0.5
    """
    if table.count_third(t3) == 0:
        raise UndefinedProbabilityError(f"Probabilidade indefinida: nenhuma ocorrência de {table.fields[2]}={t3}")
    suporte = table.count_second_third(t2, t3)
    if suporte == 0:
        raise UndefinedProbabilityError(
            f"Probabilidade indefinida: nenhuma ocorrência de {table.fields[1]}={t2} com {table.fields[2]}={t3}"
        )
    return table.count(t1, t2, t3) / suporte


def joint_given_third(table: CooccurrenceTable, t1: Rotulo, t2: Rotulo, t3: Rotulo) -> float:
    """P(T1 = t1, T2 = t2 | T3 = t3)."""
    base = table.count_third(t3)
    if base == 0:
        raise UndefinedProbabilityError(f"Probabilidade indefinida: nenhuma ocorrência de {table.fields[2]}={t3}")
    return table.count(t1, t2, t3) / base


def second_given_third(table: CooccurrenceTable, t2: Rotulo, t3: Rotulo) -> float:
    """P(T2 = t2 | T3 = t3)."""
    base = table.count_third(t3)
    if base == 0:
        raise UndefinedProbabilityError(f"Probabilidade indefinida: nenhuma ocorrência de {table.fields[2]}={t3}")
    return table.count_second_third(t2, t3) / base


def query_conditional(table: CooccurrenceTable, t1: Optional[Rotulo] = None, t2: Optional[Rotulo] = None,
                      t3: Optional[Rotulo] = None) -> List[Dict[str, Any]]:
    """
    Enumera P(T1 | T2, T3) para todos os pares condicionantes definidos.

    Valores informados filtram as linhas; um valor condicionante (ou par)
    informado sem ocorrências gera UndefinedProbabilityError.

    Returns:
        Linhas {t1, t2, t3, probability, count, support}, por par e probabilidade decrescente
    """
    if t2 is not None and t3 is not None:
        conditional_probability(table, t1 if t1 is not None else "", t2, t3)
    elif t3 is not None and table.count_third(t3) == 0:
        raise UndefinedProbabilityError(f"Probabilidade indefinida: nenhuma ocorrência de {table.fields[2]}={t3}")
    elif t2 is not None and table.count_second(t2) == 0:
        raise UndefinedProbabilityError(f"Probabilidade indefinida: nenhuma ocorrência de {table.fields[1]}={t2}")

    linhas = []
    for segundo, terceiro in table.pairs():
        if (t2 is not None and segundo != t2) or (t3 is not None and terceiro != t3):
            continue
        suporte = table.count_second_third(segundo, terceiro)
        candidatos = [t1] if t1 is not None else table.values(0)
        grupo = []
        for primeiro in candidatos:
            contagem = table.count(primeiro, segundo, terceiro)
            if contagem == 0 and t1 is None:
                continue
            grupo.append({
                "t1": primeiro, "t2": segundo, "t3": terceiro,
                "probability": contagem / suporte, "count": contagem, "support": suporte,
            })
        grupo.sort(key=lambda linha: (-linha["probability"], str(linha["t1"])))
        linhas.extend(grupo)
    return linhas


def top_confusions(cm: ConfusionMatrix, n: int) -> List[Tuple[int, int, int, int]]:
    """
    Células fora da diagonal com contagem positiva, em ordem decrescente.

    Returns:
        Até n tuplas (verdadeiro, previsto, contagem, contagem simétrica)

    Examples:
        >>> top_confusions(ConfusionMatrix(np.array([[0, 5], [3, 0]]), ["a", "b"]), 1)
        [(0, 1, 5, 3)]
    """
    if n < 1:
        raise InvalidArgumentError(f"n deve ser ao menos 1, recebido {n}")
    contagens = cm.counts
    celulas = [(int(contagens[t, p]), t, p)
               for t in range(contagens.shape[0]) for p in range(contagens.shape[1])
               if t != p and contagens[t, p] > 0]
    celulas.sort(key=lambda c: (-c[0], c[1], c[2]))
    return [(t, p, contagem, int(contagens[p, t])) for contagem, t, p in celulas[:n]]


def shared_activations(model: MultiTaskModel, features: np.ndarray) -> np.ndarray:
    """Ativações da camada compartilhada, relu(W_c·x + b_c)."""
    return relu(dense_forward(model.shared, np.asarray(features, dtype=model.dtype)))


def export_shared_features(model: MultiTaskModel, dataset: FeatureDataset, particao: str,
                           path: Union[str, Path]) -> np.ndarray:
    """
    Grava as ativações compartilhadas das amostras da partição no formato OMFT.

    Returns:
        Matriz [N × H] gravada

    Raises:
        InvalidArgumentError: Partição vazia ou dimensão incompatível
    """
    linhas = dataset.indices(particao)
    if linhas.size == 0:
        raise InvalidArgumentError(f"Partição '{particao}' vazia")
    if dataset.dim != model.input_dim:
        raise InvalidArgumentError(f"Modelo espera D={model.input_dim}, características têm D={dataset.dim}")
    ativacoes = shared_activations(model, dataset.features[linhas]).astype(np.float32)
    write_feature_matrix(path, ativacoes)
    return ativacoes


def _pares(records: Iterable[Dict[str, Any]], campo_a: str, campo_b: str,
           largura: int) -> Counter:
    pares: Counter = Counter()
    for registro in records:
        for a in valores_campo(registro, campo_a, largura):
            for b in valores_campo(registro, campo_b, largura):
                pares[(a, b)] += 1
    return pares


def _entropia(contagens: Iterable[int]) -> float:
    valores = np.array([c for c in contagens if c > 0], dtype=np.float64)
    if valores.size == 0:
        return 0.0
    p = valores / valores.sum()
    return float(-np.sum(p * np.log(p)))


def mutual_information(records: Sequence[Dict[str, Any]], campo_a: str, campo_b: str,
                       bin_width: int = LARGURA_BIN_PERIODO) -> float:
    """
    Informação mútua empírica I(A; B) em nats entre dois campos.

    Returns:
        Valor ≥ 0; 0 sem pares observados
    """
    pares = _pares(records, campo_a, campo_b, bin_width)
    total = sum(pares.values())
    if total == 0:
        return 0.0
    marg_a: Counter = Counter()
    marg_b: Counter = Counter()
    for (a, b), contagem in pares.items():
        marg_a[a] += contagem
        marg_b[b] += contagem
    info = 0.0
    for (a, b), contagem in pares.items():
        info += contagem / total * math.log(contagem * total / (marg_a[a] * marg_b[b]))
    return max(info, 0.0)


def conditional_entropy(records: Sequence[Dict[str, Any]], campo_alvo: str, campo_dado: str,
                        bin_width: int = LARGURA_BIN_PERIODO) -> float:
    """
    Entropia condicional empírica H(alvo | dado) em nats.

    Examples:
        >>> regs = [{"id": "1", "artist": "A", "types": ["print"]},
        ...         {"id": "2", "artist": "B", "types": ["drawing"]}]
        >>> conditional_entropy(regs, "type", "artist")
        0.0
    """
    pares = _pares(records, campo_alvo, campo_dado, bin_width)
    total = sum(pares.values())
    if total == 0:
        return 0.0
    por_dado: Dict[Rotulo, Counter] = {}
    for (alvo, dado), contagem in pares.items():
        por_dado.setdefault(dado, Counter())[alvo] += contagem
    return float(sum(sum(c.values()) / total * _entropia(c.values()) for c in por_dado.values()))


def suggest_label(valor: str, candidatos: Iterable[Rotulo]) -> Optional[str]:
    """Rótulo mais parecido (Levenshtein) entre os candidatos, para mensagens "quis dizer"."""
    return encontrar_rotulo_similar(str(valor), [str(c) for c in candidatos])
