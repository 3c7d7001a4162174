"""
Módulo de dados do motor multitarefa.

Este módulo lê e grava matrizes de características (formato OMFT) e metadados
em JSON Lines, constrói vocabulários de rótulos, aplica stemming aos materiais,
resolve períodos de criação, faz a divisão estratificada por classe da tarefa
âncora e gera conjuntos sintéticos com tarefas correlacionadas.
"""

import json
import math
import struct
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import (
    LARGURA_BIN_PERIODO,
    MAGIC_CARACTERISTICAS,
    MIN_AMOSTRAS_POR_CLASSE_SPLIT,
    MIN_AMOSTRAS_ROTULO,
    ORDEM_TAREFAS,
    PROPORCOES_SPLIT_PADRAO,
    SINTETICO_ANO_INICIAL,
    SINTETICO_FRACAO_INTERVALOS,
    SINTETICO_MATERIAIS_POR_OBRA,
    SINTETICO_MEIA_LARGURA_INTERVALO,
    SINTETICO_RUIDO_CARACTERISTICAS,
    SINTETICO_RUIDO_PERIODO,
    SINTETICO_TIPOS,
    SUFIXOS_STEMMING,
    TAMANHO_CABECALHO_CARACTERISTICAS,
    TAMANHO_MINIMO_RADICAL,
    TAREFA_ANCORA_PADRAO,
    TAREFAS,
    VERSAO_CARACTERISTICAS,
)
from .excecoes import (
    DataMismatchError,
    EmptyVocabularyError,
    FormatError,
    InvalidArgumentError,
    StratificationError,
)
from .normalizacao import eh_rotulo_excluido, normalizar_rotulo
from .parser import extrair_periodo
from .validacao import validar_estrutura_split, validar_proporcoes, validar_registro_metadados

Caminho = Union[str, Path]


@dataclass
class LabelVocabulary:
    """
    Vocabulário de uma tarefa categórica.

    Attributes:
        task: Nome da tarefa
        labels: Rótulos na ordem dos ids (0..K-1)
        counts: Frequência de cada rótulo (amostras que o contêm)
    """
    task: str
    labels: List[str]
    counts: List[int]

    def __post_init__(self):
        if len(self.labels) != len(self.counts):
            raise InvalidArgumentError("Rótulos e contagens com tamanhos diferentes")
        if len(set(self.labels)) != len(self.labels):
            raise InvalidArgumentError(f"Vocabulário '{self.task}' com rótulos repetidos")
        self._indices = {rotulo: i for i, rotulo in enumerate(self.labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, rotulo: str) -> bool:
        return rotulo in self._indices

    def id_of(self, rotulo: str) -> Optional[int]:
        return self._indices.get(rotulo)

    def label_of(self, indice: int) -> str:
        return self.labels[indice]

    def to_dict(self) -> Dict[str, Any]:
        return {"task": self.task, "labels": list(self.labels), "counts": list(self.counts)}

    @classmethod
    def from_dict(cls, dados: Dict[str, Any]) -> "LabelVocabulary":
        return cls(dados["task"], list(dados["labels"]), [int(c) for c in dados["counts"]])


@dataclass
class SplitAssignment:
    """
    Atribuição de partições por amostra.

    Attributes:
        assignments: id da amostra -> "train" | "val" | "test" | "excluded"
        seed: Semente usada no embaralhamento
        ratios: Proporções (treino, validação, teste)
    """
    assignments: Dict[str, str]
    seed: int
    ratios: Tuple[float, float, float]

    def tags(self, sample_ids: Sequence[str]) -> np.ndarray:
        faltando = [i for i in sample_ids if i not in self.assignments]
        if faltando:
            raise DataMismatchError(
                f"{len(faltando)} amostra(s) sem partição no arquivo de divisão (ex.: '{faltando[0]}')"
            )
        return np.array([self.assignments[i] for i in sample_ids], dtype="<U8")

    def counts(self) -> Dict[str, int]:
        return dict(Counter(self.assignments.values()))

    def to_dict(self) -> Dict[str, Any]:
        return {"seed": self.seed, "ratios": list(self.ratios), "assignments": self.assignments}

    def save(self, path: Caminho) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)
            f.write("\n")

    @classmethod
    def load(cls, path: Caminho) -> "SplitAssignment":
        caminho = Path(path)
        if not caminho.exists():
            raise FileNotFoundError(f"Arquivo de divisão não encontrado: {caminho}")
        try:
            with open(caminho, 'r', encoding='utf-8') as f:
                dados = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"Arquivo de divisão com JSON inválido: {e.msg}", linha=e.lineno)
        if not isinstance(dados, dict):
            raise FormatError("Arquivo de divisão deve conter um objeto JSON")
        valido, erros = validar_estrutura_split(dados)
        if not valido:
            raise FormatError(f"Estrutura do arquivo de divisão inválida: {'; '.join(erros)}")
        return cls(dict(dados["assignments"]), dados["seed"], tuple(dados["ratios"]))


@dataclass(eq=False)
class FeatureDataset:
    """
    Matriz de características com rótulos por tarefa.

    Attributes:
        features: Matriz [N × D] float32
        sample_ids: Identificadores das amostras
        labels: Por tarefa: "artist" -> ids (-1 = ausente); "type"/"material" ->
            tuplas de ids (vazia = ausente); "period" -> anos (nan = ausente)
        vocabularies: Vocabulário de cada tarefa categórica
        split: Partição por amostra (None até uma divisão ser aplicada)
        period_stats: (média, desvio) do período na partição de treino
        records: Registros de metadados de origem
    """
    features: np.ndarray
    sample_ids: List[str]
    labels: Dict[str, Any]
    vocabularies: Dict[str, LabelVocabulary]
    split: Optional[np.ndarray] = None
    period_stats: Optional[Tuple[float, float]] = None
    records: List[Dict[str, Any]] = field(default_factory=list)

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] < 1 or self.features.shape[1] < 1:
            raise InvalidArgumentError(f"Matriz de características com forma inválida: {self.features.shape}")
        if not np.all(np.isfinite(self.features)):
            raise InvalidArgumentError("Matriz de características contém NaN ou Inf")
        if len(self.sample_ids) != self.features.shape[0]:
            raise DataMismatchError(
                f"{len(self.sample_ids)} identificadores para {self.features.shape[0]} linhas de características"
            )
        if "artist" in self.labels and "artist" in self.vocabularies:
            ids = self.labels["artist"]
            if np.any(ids >= len(self.vocabularies["artist"])) or np.any(ids < -1):
                raise InvalidArgumentError("Id de artista fora do vocabulário")
        for tarefa in ("type", "material"):
            if tarefa in self.labels and tarefa in self.vocabularies:
                limite = len(self.vocabularies[tarefa])
                if any(i < 0 or i >= limite for conjunto in self.labels[tarefa] for i in conjunto):
                    raise InvalidArgumentError(f"Id de '{tarefa}' fora do vocabulário")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def available_tasks(self) -> List[str]:
        """Tarefas com rótulos (e vocabulário, quando categóricas)."""
        disponiveis = []
        for tarefa in ORDEM_TAREFAS:
            tipo, _ = TAREFAS[tarefa]
            if tarefa not in self.labels:
                continue
            if tipo != "regression" and tarefa not in self.vocabularies:
                continue
            disponiveis.append(tarefa)
        return disponiveis

    def output_dim(self, tarefa: str) -> int:
        if TAREFAS[tarefa][0] == "regression":
            return 1
        return len(self.vocabularies[tarefa])

    def indices(self, particao: str) -> np.ndarray:
        if self.split is None:
            raise InvalidArgumentError("Conjunto de dados sem divisão aplicada")
        return np.flatnonzero(self.split == particao)

    def task_targets(self, tarefa: str, indices: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Alvos e máscara de rótulos de uma tarefa para as linhas indicadas.

        Returns:
            Tupla (alvos, máscara); o período é padronizado com period_stats
        """
        tipo, _ = TAREFAS[tarefa]
        if tipo == "multiclass":
            ids = self.labels[tarefa][indices]
            mascara = ids >= 0
            return np.where(mascara, ids, 0).astype(np.int64), mascara
        if tipo == "multilabel":
            alvos = np.zeros((len(indices), self.output_dim(tarefa)), dtype=np.float32)
            for linha, i in enumerate(indices):
                alvos[linha, list(self.labels[tarefa][i])] = 1
            return alvos, alvos.sum(axis=1) > 0
        if self.period_stats is None:
            raise InvalidArgumentError("Estatísticas de período ausentes; use fit_period_stats")
        media, desvio = self.period_stats
        anos = self.labels[tarefa][indices]
        mascara = np.isfinite(anos)
        return np.where(mascara, (anos - media) / desvio, 0.0).astype(np.float32), mascara


# ---------------------------------------------------------------------------
# Arquivos
# ---------------------------------------------------------------------------

def write_feature_matrix(path: Caminho, matrix: np.ndarray) -> None:
    """
    Grava matriz no formato OMFT: "OMFT", u32 versão, u64 N, u64 D, N·D float32 LE.
    """
    matriz = np.asarray(matrix)
    if matriz.ndim != 2:
        raise InvalidArgumentError("Apenas matrizes bidimensionais podem ser gravadas")
    N, D = matriz.shape
    with open(path, 'wb') as f:
        f.write(MAGIC_CARACTERISTICAS + struct.pack("<IQQ", VERSAO_CARACTERISTICAS, N, D))
        f.write(np.ascontiguousarray(matriz, dtype="<f4").tobytes())


def load_feature_matrix(path: Caminho) -> np.ndarray:
    """
    Lê matriz de características no formato OMFT.

    Returns:
        Matriz [N × D] float32

    Raises:
        FileNotFoundError: Se o arquivo não existir
        FormatError: Magic, versão, dimensões, tamanho ou valores inválidos (com offset)
    """
    caminho = Path(path)
    if not caminho.exists():
        raise FileNotFoundError(f"Arquivo de características não encontrado: {caminho}")
    dados = caminho.read_bytes()

    if len(dados) < TAMANHO_CABECALHO_CARACTERISTICAS:
        raise FormatError("Cabeçalho de características truncado", offset=len(dados))
    if dados[:4] != MAGIC_CARACTERISTICAS:
        raise FormatError(f"Magic inválido {dados[:4]!r}, esperado {MAGIC_CARACTERISTICAS!r}", offset=0)
    versao, N, D = struct.unpack_from("<IQQ", dados, 4)
    if versao != VERSAO_CARACTERISTICAS:
        raise FormatError(f"Versão de formato não suportada: {versao}", offset=4)
    if N < 1:
        raise FormatError("Número de linhas N deve ser ao menos 1", offset=8)
    if D < 1:
        raise FormatError("Dimensão D deve ser ao menos 1", offset=16)

    esperado = TAMANHO_CABECALHO_CARACTERISTICAS + 4 * N * D
    if len(dados) < esperado:
        raise FormatError(f"Arquivo truncado: esperados {esperado} bytes, encontrados {len(dados)}",
                          offset=len(dados))
    if len(dados) > esperado:
        raise FormatError(f"Bytes excedentes após a matriz ({len(dados) - esperado})", offset=esperado)

    matriz = np.frombuffer(dados, dtype="<f4", count=N * D,
                           offset=TAMANHO_CABECALHO_CARACTERISTICAS).astype(np.float32).reshape(N, D)
    invalidos = np.flatnonzero(~np.isfinite(matriz.reshape(-1)))
    if invalidos.size:
        raise FormatError("Valor não finito na matriz de características",
                          offset=TAMANHO_CABECALHO_CARACTERISTICAS + 4 * int(invalidos[0]))
    return matriz


def read_metadata(path: Caminho) -> List[Dict[str, Any]]:
    """
    Lê metadados em JSON Lines, um objeto por amostra.

    Raises:
        FileNotFoundError: Se o arquivo não existir
        FormatError: JSON inválido, registro inválido ou id repetido (com número da linha)
    """
    caminho = Path(path)
    if not caminho.exists():
        raise FileNotFoundError(f"Arquivo de metadados não encontrado: {caminho}")

    registros = []
    vistos = set()
    with open(caminho, 'r', encoding='utf-8') as f:
        for numero, linha in enumerate(f, 1):
            if not linha.strip():
                continue
            try:
                registro = json.loads(linha)
            except json.JSONDecodeError as e:
                raise FormatError(f"JSON inválido: {e.msg}", linha=numero)
            valido, erros = validar_registro_metadados(registro, numero)
            if not valido:
                raise FormatError('; '.join(erros), linha=numero)
            if registro["id"] in vistos:
                raise FormatError(f"Id repetido '{registro['id']}'", linha=numero)
            vistos.add(registro["id"])
            registros.append(registro)

    if not registros:
        raise FormatError("Arquivo de metadados vazio", linha=1)
    return registros


def write_metadata(path: Caminho, records: Iterable[Dict[str, Any]]) -> None:
    """Grava registros em JSON Lines (UTF-8)."""
    with open(path, 'w', encoding='utf-8') as f:
        for registro in records:
            f.write(json.dumps(registro, ensure_ascii=False))
            f.write("\n")


# ---------------------------------------------------------------------------
# Rótulos
# ---------------------------------------------------------------------------

def stem_material_token(token: str) -> str:
    """
    Radical de uma palavra de material.

    Converte para minúsculas e remove o primeiro sufixo aplicável entre
    "ings", "ing", "es", "s" (nessa ordem) enquanto o radical mantiver ao menos
    3 caracteres; repete até não haver mudança. Um "ss" final é preservado.

    Examples:
        >>> stem_material_token("Papers")
        'paper'
        >>> stem_material_token("etchings")
        'etch'
        >>> stem_material_token("oil")
        'oil'
    """
    if not token or not isinstance(token, str):
        return ""
    palavra = token.strip().lower()

    mudou = True
    while mudou:
        mudou = False
        for sufixo in SUFIXOS_STEMMING:
            if not palavra.endswith(sufixo):
                continue
            if len(palavra) - len(sufixo) < TAMANHO_MINIMO_RADICAL:
                continue
            if sufixo == "s" and palavra.endswith("ss"):
                continue
            palavra = palavra[:-len(sufixo)]
            mudou = True
            break
    return palavra


def stem_material_label(rotulo: str) -> str:
    """
    Aplica stem_material_token a cada palavra de um rótulo de material.

    Examples:
        >>> stem_material_label("Oil Paintings")
        'oil paint'
    """
    return " ".join(stem_material_token(palavra) for palavra in normalizar_rotulo(rotulo).split(" ") if palavra)


def labels_of(registro: Dict[str, Any], tarefa: str) -> List[str]:
    """
    Rótulos normalizados de uma tarefa categórica em um registro (sem repetição).
    """
    tipo, campo = TAREFAS[tarefa]
    if tipo == "regression":
        raise InvalidArgumentError(f"Tarefa '{tarefa}' não é categórica")
    valor = registro.get(campo)
    if valor is None:
        return []
    brutos = [valor] if isinstance(valor, str) else list(valor)

    rotulos = []
    for bruto in brutos:
        rotulo = stem_material_label(bruto) if tarefa == "material" else normalizar_rotulo(bruto)
        if rotulo and rotulo not in rotulos:
            rotulos.append(rotulo)
    return rotulos


def build_label_vocab(records: Sequence[Dict[str, Any]], task: str, min_samples: int) -> LabelVocabulary:
    """
    Constrói o vocabulário de uma tarefa categórica.

    Rótulos ambíguos ("unknown", "anonymous") e rótulos com menos de min_samples
    amostras são descartados; ids seguem a frequência decrescente, com desempate
    lexicográfico.

    Raises:
        InvalidArgumentError: min_samples < 1 ou tarefa não categórica
        EmptyVocabularyError: Nenhum rótulo sobreviveu

    Examples:
        >>> regs = [{"id": str(i), "artist": "X" if i < 4 else "Y"} for i in range(8)]
        >>> build_label_vocab(regs, "artist", 1).labels
        ['X', 'Y']
    """
    if min_samples < 1:
        raise InvalidArgumentError(f"min_samples deve ser ao menos 1, recebido {min_samples}")
    if task not in TAREFAS:
        raise InvalidArgumentError(f"Tarefa desconhecida '{task}'")

    contagens: Counter = Counter()
    for registro in records:
        for rotulo in labels_of(registro, task):
            if not eh_rotulo_excluido(rotulo):
                contagens[rotulo] += 1

    sobreviventes = sorted(((r, c) for r, c in contagens.items() if c >= min_samples),
                           key=lambda item: (-item[1], item[0]))
    if not sobreviventes:
        raise EmptyVocabularyError(
            f"Nenhum rótulo da tarefa '{task}' com ao menos {min_samples} amostra(s)"
        )
    return LabelVocabulary(task, [r for r, _ in sobreviventes], [c for _, c in sobreviventes])


def anchor_excluded(registro: Dict[str, Any], anchor_task: str = TAREFA_ANCORA_PADRAO) -> bool:
    """Verifica se o rótulo da tarefa âncora é ambíguo ("+u": unknown, anonymous)."""
    rotulos = labels_of(registro, anchor_task)
    return bool(rotulos) and all(eh_rotulo_excluido(r) for r in rotulos)


def build_vocabularies(records: Sequence[Dict[str, Any]], min_samples: int = MIN_AMOSTRAS_ROTULO,
                       anchor_task: str = TAREFA_ANCORA_PADRAO) -> Dict[str, LabelVocabulary]:
    """
    Vocabulários de todas as tarefas categóricas.

    min_samples vale para a tarefa âncora; as demais usam MIN_AMOSTRAS_ROTULO e são
    omitidas quando não têm rótulos. Amostras com âncora ambígua não contam.
    """
    if TAREFAS.get(anchor_task, ("",))[0] != "multiclass":
        raise InvalidArgumentError(f"Tarefa âncora '{anchor_task}' deve ser multiclass")
    incluidos = [r for r in records if not anchor_excluded(r, anchor_task)]
    vocabularios = {anchor_task: build_label_vocab(incluidos, anchor_task, min_samples)}
    for tarefa in ORDEM_TAREFAS:
        if tarefa == anchor_task or TAREFAS[tarefa][0] == "regression":
            continue
        try:
            vocabularios[tarefa] = build_label_vocab(incluidos, tarefa, MIN_AMOSTRAS_ROTULO)
        except EmptyVocabularyError:
            continue
    return vocabularios


def anchor_ids(records: Sequence[Dict[str, Any]], vocabulary: LabelVocabulary,
               anchor_task: str = TAREFA_ANCORA_PADRAO) -> List[Optional[int]]:
    """Id da tarefa âncora por registro (None quando ambíguo ou fora do vocabulário)."""
    ids: List[Optional[int]] = []
    for registro in records:
        if anchor_excluded(registro, anchor_task):
            ids.append(None)
            continue
        validos = sorted(i for i in (vocabulary.id_of(r) for r in labels_of(registro, anchor_task))
                         if i is not None)
        ids.append(validos[0] if validos else None)
    return ids


def cohort_sizes(records: Sequence[Dict[str, Any]], task: str,
                 thresholds: Sequence[int]) -> Dict[int, int]:
    """
    Número de classes sobreviventes para cada limiar de amostras por classe.

    Examples:
        >>> regs = [{"id": str(i), "artist": "A" if i < 5 else "B"} for i in range(7)]
        >>> cohort_sizes(regs, "artist", [1, 3, 6])
        {1: 2, 3: 1, 6: 0}
    """
    tamanhos = {}
    for limiar in thresholds:
        try:
            tamanhos[limiar] = len(build_label_vocab(records, task, limiar))
        except EmptyVocabularyError:
            tamanhos[limiar] = 0
    return tamanhos


def resolve_period(raw: Any) -> float:
    """
    Converte o período bruto em ano.

    Anos exatos passam direto; intervalos [a, b] viram a média (a + b)/2; textos
    como "1600-1650", "c. 1635" ou datas ISO são interpretados antes.

    Raises:
        InvalidArgumentError: Intervalo com a > b, valor não finito ou irreconhecível

    Examples:
        >>> resolve_period([1600, 1650])
        1625.0
        >>> resolve_period(1635)
        1635.0
    """
    if raw is None or isinstance(raw, bool):
        raise InvalidArgumentError(f"Período inválido: {raw!r}")
    if isinstance(raw, (int, float, np.integer, np.floating)):
        ano = float(raw)
        if not math.isfinite(ano):
            raise InvalidArgumentError("Período deve ser finito")
        return ano
    if isinstance(raw, (list, tuple)):
        if len(raw) != 2:
            raise InvalidArgumentError(f"Intervalo deve ter dois extremos: {raw!r}")
        inicio, fim = resolve_period(raw[0]), resolve_period(raw[1])
        if inicio > fim:
            raise InvalidArgumentError(f"Intervalo com início {inicio} maior que fim {fim}")
        return min(max((inicio + fim) / 2, inicio), fim)
    if isinstance(raw, str):
        periodo = extrair_periodo(raw)
        if periodo is None:
            raise InvalidArgumentError(f"Período não reconhecido: '{raw}'")
        return resolve_period(periodo)
    raise InvalidArgumentError(f"Tipo de período não suportado: {type(raw).__name__}")


# ---------------------------------------------------------------------------
# Conjunto de dados e divisão
# ---------------------------------------------------------------------------

def build_dataset(features: np.ndarray, records: Sequence[Dict[str, Any]],
                  vocabularies: Optional[Dict[str, LabelVocabulary]] = None,
                  min_samples: int = MIN_AMOSTRAS_ROTULO,
                  anchor_task: str = TAREFA_ANCORA_PADRAO) -> FeatureDataset:
    """
    Junta a matriz de características aos registros de metadados (mesma ordem).

    Raises:
        DataMismatchError: Número de linhas diferente do número de registros
        FormatError: Período irreconhecível em algum registro
    """
    if features.ndim != 2 or features.shape[0] != len(records):
        raise DataMismatchError(
            f"Características com {features.shape[0] if features.ndim else 0} linhas "
            f"para {len(records)} registros de metadados"
        )
    vocabularios = vocabularies if vocabularies is not None else build_vocabularies(
        records, min_samples, anchor_task)

    rotulos: Dict[str, Any] = {}
    for tarefa in ORDEM_TAREFAS:
        tipo, campo = TAREFAS[tarefa]
        if tipo == "regression":
            anos = np.full(len(records), np.nan)
            for i, registro in enumerate(records):
                if registro.get(campo) is not None and not anchor_excluded(registro, anchor_task):
                    try:
                        anos[i] = resolve_period(registro[campo])
                    except InvalidArgumentError as e:
                        raise FormatError(f"Registro '{registro.get('id')}': {e}")
            if np.any(np.isfinite(anos)):
                rotulos[tarefa] = anos
            continue
        if tarefa not in vocabularios:
            continue
        vocabulario = vocabularios[tarefa]
        por_amostra = []
        for registro in records:
            if anchor_excluded(registro, anchor_task):
                por_amostra.append(())
                continue
            ids = [vocabulario.id_of(r) for r in labels_of(registro, tarefa)]
            por_amostra.append(tuple(sorted(i for i in ids if i is not None)))
        if tipo == "multiclass":
            rotulos[tarefa] = np.array([ids[0] if ids else -1 for ids in por_amostra], dtype=np.int64)
        else:
            rotulos[tarefa] = por_amostra

    return FeatureDataset(
        features=np.asarray(features, dtype=np.float32),
        sample_ids=[r["id"] for r in records],
        labels=rotulos,
        vocabularies=dict(vocabularios),
        records=list(records),
    )


def split_counts(m: int, ratios: Sequence[float]) -> Tuple[int, int, int]:
    """
    Quantidades (treino, validação, teste) para uma classe de tamanho m.

    Treino recebe ⌊r_treino·m⌋ (ao menos 1), teste ⌊r_teste·m⌋ (ao menos 1) e
    validação o restante, que nunca fica vazio.

    Examples:
        >>> split_counts(10, (0.7, 0.2, 0.1))
        (7, 2, 1)
        >>> split_counts(3, (0.7, 0.2, 0.1))
        (1, 1, 1)
    """
    if m < MIN_AMOSTRAS_POR_CLASSE_SPLIT:
        raise InvalidArgumentError(f"Classe com {m} amostras não pode ser dividida")
    treino = max(1, math.floor(ratios[0] * m + 1e-9))
    teste = max(1, math.floor(ratios[2] * m + 1e-9))
    validacao = m - treino - teste
    while validacao < 1:
        if treino >= teste and treino > 1:
            treino -= 1
        else:
            teste -= 1
        validacao += 1
    return treino, validacao, teste


def stratify_labels(sample_ids: Sequence[str], anchor_labels: Sequence[Optional[Any]],
                    ratios: Sequence[float] = PROPORCOES_SPLIT_PADRAO, seed: int = 0,
                    class_names: Optional[Sequence[str]] = None) -> SplitAssignment:
    """
    Divisão estratificada a partir dos rótulos da tarefa âncora.

    Amostras sem rótulo âncora (None) ficam em "excluded". Dentro de cada classe a
    atribuição é um embaralhamento com semente.

    Raises:
        InvalidArgumentError: Proporções inválidas ou ids repetidos
        StratificationError: Classe com menos de 3 amostras
    """
    valido, erro = validar_proporcoes(list(ratios))
    if not valido:
        raise InvalidArgumentError(f"Proporções inválidas: {erro}")
    if len(sample_ids) != len(anchor_labels):
        raise InvalidArgumentError("Número de ids difere do número de rótulos")
    if len(set(sample_ids)) != len(sample_ids):
        raise InvalidArgumentError("Ids de amostra repetidos")

    grupos: Dict[Any, List[int]] = {}
    for i, rotulo in enumerate(anchor_labels):
        if rotulo is not None:
            grupos.setdefault(rotulo, []).append(i)

    for classe in sorted(grupos):
        if len(grupos[classe]) < MIN_AMOSTRAS_POR_CLASSE_SPLIT:
            nome = class_names[classe] if class_names is not None else str(classe)
            raise StratificationError(nome, len(grupos[classe]), MIN_AMOSTRAS_POR_CLASSE_SPLIT)

    particoes = ["excluded"] * len(sample_ids)
    rng = np.random.default_rng(seed)
    for classe in sorted(grupos):
        membros = np.array(grupos[classe])
        membros = membros[rng.permutation(len(membros))]
        treino, validacao, _ = split_counts(len(membros), ratios)
        for posicao, indice in enumerate(membros):
            if posicao < treino:
                particoes[indice] = "train"
            elif posicao < treino + validacao:
                particoes[indice] = "val"
            else:
                particoes[indice] = "test"

    return SplitAssignment(dict(zip(sample_ids, particoes)), seed, tuple(float(r) for r in ratios))


def stratified_split(dataset: FeatureDataset, anchor_task: str = TAREFA_ANCORA_PADRAO,
                     ratios: Sequence[float] = PROPORCOES_SPLIT_PADRAO, seed: int = 0) -> SplitAssignment:
    """
    Divisão estratificada por classe da tarefa âncora (artista, por padrão).

    Returns:
        SplitAssignment determinística para a semente dada
    """
    if TAREFAS.get(anchor_task, ("",))[0] != "multiclass" or anchor_task not in dataset.labels:
        raise InvalidArgumentError(f"Tarefa âncora '{anchor_task}' indisponível para estratificação")
    ids = dataset.labels[anchor_task]
    rotulos = [int(i) if i >= 0 else None for i in ids]
    return stratify_labels(dataset.sample_ids, rotulos, ratios, seed,
                           dataset.vocabularies[anchor_task].labels)


def apply_split(dataset: FeatureDataset, assignment: SplitAssignment) -> FeatureDataset:
    """Aplica a divisão ao conjunto de dados (altera e devolve o próprio objeto)."""
    dataset.split = assignment.tags(dataset.sample_ids)
    return dataset


def fit_period_stats(dataset: FeatureDataset, particao: str = "train") -> Optional[Tuple[float, float]]:
    """
    Média e desvio do período na partição indicada, usados na padronização.

    Returns:
        (média, desvio) ou None se não houver períodos rotulados
    """
    if "period" not in dataset.labels:
        return None
    anos = dataset.labels["period"][dataset.indices(particao)]
    anos = anos[np.isfinite(anos)]
    if anos.size == 0:
        return None
    desvio = float(np.std(anos))
    dataset.period_stats = (float(np.mean(anos)), desvio if desvio > 0 else 1.0)
    return dataset.period_stats


# ---------------------------------------------------------------------------
# Gerador sintético
# ---------------------------------------------------------------------------

def generate_synthetic(n_classes: int, samples_per_class: int, D: int, entanglement: float,
                       seed: int) -> FeatureDataset:
    """
    Gera conjunto sintético com tarefas correlacionadas ao artista.

    Cada artista tem um protótipo gaussiano de características, uma faixa de 25
    anos própria e um material principal exclusivo. Com probabilidade igual ao
    entrelaçamento cada atributo segue o artista; caso contrário é sorteado de
    forma uniforme e independente. Os registros guardam os parâmetros geradores
    em "generative".

    Args:
        n_classes: Número de artistas
        samples_per_class: Obras por artista
        D: Dimensão das características
        entanglement: Em [0, 1]; 1 = atributos determinados pelo artista
        seed: Semente

    Returns:
        FeatureDataset sem divisão aplicada, com os registros de metadados
    """
    if n_classes < 1 or samples_per_class < 1 or D < 1:
        raise InvalidArgumentError("Parâmetros do gerador sintético devem ser positivos")
    if not 0 <= entanglement <= 1:
        raise InvalidArgumentError(f"Entrelaçamento deve estar em [0, 1], recebido {entanglement}")

    rng = np.random.default_rng(seed)
    n_comuns = max(2, n_classes // 4)
    n_materiais = n_classes + n_comuns

    prototipos = rng.normal(0.0, 1.0, size=(n_classes, D))
    faixas = rng.permutation(n_classes)
    anos_medios = SINTETICO_ANO_INICIAL + LARGURA_BIN_PERIODO * faixas + LARGURA_BIN_PERIODO / 2
    tipos_preferidos = rng.integers(0, SINTETICO_TIPOS, size=n_classes)
    materiais_secundarios = n_classes + rng.integers(0, n_comuns, size=n_classes)
    ano_final = SINTETICO_ANO_INICIAL + LARGURA_BIN_PERIODO * n_classes

    total = n_classes * samples_per_class
    artistas = rng.permutation(np.repeat(np.arange(n_classes), samples_per_class))
    caracteristicas = prototipos[artistas] + rng.normal(0.0, SINTETICO_RUIDO_CARACTERISTICAS, size=(total, D))

    registros = []
    for i, artista in enumerate(artistas):
        segue_periodo = bool(rng.random() < entanglement)
        if segue_periodo:
            ano = anos_medios[artista] + rng.normal(0.0, SINTETICO_RUIDO_PERIODO)
        else:
            ano = rng.uniform(SINTETICO_ANO_INICIAL, ano_final)
        ano = round(float(ano), 1)

        segue_tipo = bool(rng.random() < entanglement)
        tipo = int(tipos_preferidos[artista]) if segue_tipo else int(rng.integers(0, SINTETICO_TIPOS))

        preferidos = [int(artista), int(materiais_secundarios[artista])][:SINTETICO_MATERIAIS_POR_OBRA]
        segue_material = []
        materiais = []
        for preferido in preferidos:
            segue = bool(rng.random() < entanglement)
            segue_material.append(segue)
            material = preferido if segue else int(rng.integers(0, n_materiais))
            if material not in materiais:
                materiais.append(material)

        periodo: Any = ano
        if rng.random() < SINTETICO_FRACAO_INTERVALOS:
            periodo = [ano - SINTETICO_MEIA_LARGURA_INTERVALO, ano + SINTETICO_MEIA_LARGURA_INTERVALO]

        registros.append({
            "id": f"syn-{i:06d}",
            "artist": f"artist_{artista:03d}",
            "types": [f"type_{tipo:02d}"],
            "materials": [f"material_{m:03d}" for m in materiais],
            "period": periodo,
            "generative": {
                "artist_mean_year": float(anos_medios[artista]),
                "period_from_artist": segue_periodo,
                "type_from_artist": segue_tipo,
                "materials_from_artist": segue_material,
                "entanglement": float(entanglement),
            },
        })

    return build_dataset(caracteristicas.astype(np.float32), registros)
