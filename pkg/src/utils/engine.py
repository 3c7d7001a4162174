"""
Módulo de treinamento e avaliação do motor multitarefa.

Este módulo organiza as épocas de treinamento (lotes embaralhados com semente,
passo conjunto sobre todas as tarefas, calibração de pesos e escalas após a
primeira época, seleção do melhor modelo pela perda de validação), a avaliação
de uma partição e o benchmark multitarefa x tarefas isoladas.
"""

import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import (
    BATCH_PADRAO,
    BENCH_PASSES_AQUECIMENTO,
    EPOCAS_PADRAO,
    ESCALA_REGRESSAO_PADRAO,
    MODOS_BENCHMARK,
    MODOS_CALIBRACAO,
    MOMENTUM_PADRAO,
    OCULTA_MAXIMA,
    OCULTA_PADRAO,
    POLITICAS_CALIBRACAO,
    SEMENTE_PADRAO,
    TAREFAS,
    TAXA_APRENDIZADO_PADRAO,
    TOLERANCIA_PERIODO_ANOS,
    TOP_K_PADRAO,
)
from .data import FeatureDataset, fit_period_stats
from .excecoes import InvalidArgumentError, UndefinedMetricError
from .metrics import (
    MetricsReport,
    confusion_matrix,
    interval_accuracy,
    label_map as calcular_label_map,
    mae_years,
    sample_map,
    topk_accuracy,
)
from .model import (
    LossBreakdown,
    MultiTaskModel,
    TaskSpec,
    backward_update,
    build_model,
    calibrate_weights_scales,
    compute_gradients,
    flop_count,
    forward_all_tasks,
    single_task_flop_count,
    task_loss,
)
from .nncore import Batch, init_optimizer_state
from .relatorio import formatar_linha_epoca

Caminho = Union[str, Path]


@dataclass
class TrainConfig:
    """
    Configuração de uma execução de treinamento.

    Attributes:
        batch_size: Tamanho do lote (o último lote parcial também é usado)
        epochs: Número de épocas
        lr: Taxa de aprendizado; 0 mantém os parâmetros iniciais
        momentum: Momento do SGD
        seed: Semente de inicialização e embaralhamento
        hidden: Unidades da camada compartilhada
        calibration: "off" ou "after-warmup"
        shuffle: Reembaralha o treino a cada época
        calibration_policy: "ratio" ou "scale-only"
    """
    batch_size: int = BATCH_PADRAO
    epochs: int = EPOCAS_PADRAO
    lr: float = TAXA_APRENDIZADO_PADRAO
    momentum: float = MOMENTUM_PADRAO
    seed: int = SEMENTE_PADRAO
    hidden: int = OCULTA_PADRAO
    calibration: str = "off"
    shuffle: bool = True
    calibration_policy: str = "ratio"

    def __post_init__(self):
        if self.batch_size < 1:
            raise InvalidArgumentError(f"Tamanho do lote deve ser ao menos 1, recebido {self.batch_size}")
        if self.epochs < 1:
            raise InvalidArgumentError(f"Número de épocas deve ser ao menos 1, recebido {self.epochs}")
        if not self.lr >= 0:
            raise InvalidArgumentError(f"Taxa de aprendizado não pode ser negativa: {self.lr}")
        if not 0 <= self.momentum < 1:
            raise InvalidArgumentError(f"Momento deve estar em [0, 1), recebido {self.momentum}")
        if not 1 <= self.hidden <= OCULTA_MAXIMA:
            raise InvalidArgumentError(f"Camada oculta deve ter entre 1 e {OCULTA_MAXIMA} unidades")
        if self.calibration not in MODOS_CALIBRACAO:
            raise InvalidArgumentError(f"Modo de calibração desconhecido: '{self.calibration}'")
        if self.calibration_policy not in POLITICAS_CALIBRACAO:
            raise InvalidArgumentError(f"Política de calibração desconhecida: '{self.calibration_policy}'")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class EpochRecord:
    epoch: int
    train: LossBreakdown
    validation: Optional[LossBreakdown]
    seconds: float


@dataclass
class TrainLog:
    """
    Histórico do treinamento: uma entrada por época concluída.

    Attributes:
        task_names: Tarefas, na ordem das cabeças
        epochs: Registros por época
        weights: Pesos w finais
        scales: Escalas s finais
        best_epoch: Época do modelo devolvido
        calibrated_at: Época em que a calibração ocorreu (None se não ocorreu)
    """
    task_names: List[str]
    epochs: List[EpochRecord] = field(default_factory=list)
    weights: List[float] = field(default_factory=list)
    scales: List[float] = field(default_factory=list)
    best_epoch: int = 0
    calibrated_at: Optional[int] = None

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        epocas = []
        for registro in self.epochs:
            item = {
                "epoch": registro.epoch,
                "train": registro.train.to_dict(self.task_names),
                "validation": None if registro.validation is None
                else registro.validation.to_dict(self.task_names),
            }
            if include_timing:
                item["seconds"] = registro.seconds
            epocas.append(item)
        return {
            "task_names": list(self.task_names),
            "epochs": epocas,
            "weights": [float(w) for w in self.weights],
            "scales": [float(s) for s in self.scales],
            "best_epoch": self.best_epoch,
            "calibrated_at": self.calibrated_at,
        }

    def save(self, path: Caminho) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)
            f.write("\n")


# ---------------------------------------------------------------------------
# Lotes e previsão
# ---------------------------------------------------------------------------

def default_task_specs(dataset: FeatureDataset, tasks: Optional[Sequence[str]] = None,
                       particao: str = "train") -> List[TaskSpec]:
    """
    Especificações padrão das tarefas pedidas.

    Tarefas multiclass recebem pesos por classe inversamente proporcionais à
    frequência na partição de treino (média 1 entre as classes presentes); a
    regressão recebe escala 0.1.

    Raises:
        InvalidArgumentError: Tarefa desconhecida ou sem rótulos no conjunto
    """
    disponiveis = dataset.available_tasks()
    nomes = list(tasks) if tasks is not None else disponiveis
    if not nomes:
        raise InvalidArgumentError("Nenhuma tarefa disponível no conjunto de dados")

    linhas = dataset.indices(particao) if dataset.split is not None else np.arange(dataset.n_samples)
    specs = []
    for nome in nomes:
        if nome not in TAREFAS:
            raise InvalidArgumentError(f"Tarefa desconhecida '{nome}'")
        if nome not in disponiveis:
            raise InvalidArgumentError(f"Tarefa '{nome}' sem rótulos no conjunto de dados")
        tipo, _ = TAREFAS[nome]
        if tipo == "regression":
            specs.append(TaskSpec(nome, tipo, 1, scale=ESCALA_REGRESSAO_PADRAO))
            continue
        K = dataset.output_dim(nome)
        pesos_classe = None
        if tipo == "multiclass":
            ids = dataset.labels[nome][linhas]
            contagens = np.bincount(ids[ids >= 0], minlength=K).astype(np.float64)
            presentes = contagens > 0
            pesos_classe = np.zeros(K)
            if np.any(presentes):
                pesos_classe[presentes] = 1.0 / contagens[presentes]
                pesos_classe[presentes] /= pesos_classe[presentes].mean()
        specs.append(TaskSpec(nome, tipo, K, class_weights=pesos_classe))
    return specs


def make_batch(dataset: FeatureDataset, indices: np.ndarray, task_names: Sequence[str]) -> Batch:
    """Monta o lote das linhas indicadas com alvos e máscaras de cada tarefa."""
    alvos, mascaras = [], []
    for nome in task_names:
        alvo, mascara = dataset.task_targets(nome, indices)
        alvos.append(alvo)
        mascaras.append(mascara)
    return Batch(dataset.features[indices], alvos, mascaras)


def predict(model: MultiTaskModel, features: np.ndarray, batch_size: int = 256) -> List[np.ndarray]:
    """
    Saídas de todas as cabeças para as linhas de features, em blocos.

    Returns:
        Lista com uma matriz [N × K_i] por tarefa
    """
    if features.shape[0] == 0:
        return [np.zeros((0, spec.output_dim), dtype=model.dtype) for spec in model.task_specs]
    blocos: List[List[np.ndarray]] = [[] for _ in model.heads]
    for inicio in range(0, features.shape[0], batch_size):
        _, saidas = forward_all_tasks(model, features[inicio:inicio + batch_size])
        for lista, saida in zip(blocos, saidas):
            lista.append(saida)
    return [np.concatenate(lista, axis=0) for lista in blocos]


def _recompor(brutas: np.ndarray, specs: Sequence[TaskSpec]) -> LossBreakdown:
    fatores = np.array([spec.weight * spec.scale for spec in specs], dtype=np.float64)
    ponderadas = fatores * brutas
    return LossBreakdown(np.asarray(brutas, dtype=np.float64), ponderadas, float(np.sum(ponderadas)))


def evaluate_losses(model: MultiTaskModel, dataset: FeatureDataset, particao: str) -> LossBreakdown:
    """Perdas da partição inteira (média sobre as linhas rotuladas de cada tarefa)."""
    linhas = dataset.indices(particao)
    if linhas.size == 0:
        raise InvalidArgumentError(f"Partição '{particao}' vazia")
    saidas = predict(model, dataset.features[linhas])
    brutas = []
    for spec, saida in zip(model.task_specs, saidas):
        alvo, mascara = dataset.task_targets(spec.name, linhas)
        perda, _ = task_loss(spec, saida, alvo, mascara)
        brutas.append(perda)
    return _recompor(np.array(brutas, dtype=np.float64), model.task_specs)


def _metadados_modelo(dataset: FeatureDataset, config: TrainConfig) -> Dict[str, Any]:
    return {
        "vocabularies": {t: v.to_dict() for t, v in dataset.vocabularies.items()},
        "period_stats": None if dataset.period_stats is None else list(dataset.period_stats),
        "train_config": config.to_dict(),
    }


# ---------------------------------------------------------------------------
# Treinamento
# ---------------------------------------------------------------------------

def train(dataset: FeatureDataset, specs: Sequence[TaskSpec], config: TrainConfig,
          verbose: bool = True) -> Tuple[MultiTaskModel, TrainLog]:
    """
    Treina o modelo multitarefa.

    Cada época percorre a partição de treino uma única vez, em lotes embaralhados
    com semente, atualizando tronco e cabeças com a perda combinada. Com
    calibração "after-warmup", pesos e escalas são recalculados uma vez, após a
    primeira época, a partir das perdas de validação.

    Args:
        dataset: Conjunto com divisão aplicada
        specs: Tarefas a treinar (ao menos uma)
        config: Hiperparâmetros
        verbose: Escreve uma linha de progresso por época em stderr

    Returns:
        Tupla (modelo com menor perda total de validação, histórico)

    Raises:
        InvalidArgumentError: Sem divisão, partição de treino vazia ou tarefa indisponível
    """
    if dataset.split is None:
        raise InvalidArgumentError("Conjunto de dados sem divisão aplicada")
    if not specs:
        raise InvalidArgumentError("É necessária ao menos uma tarefa para treinar")
    treino = dataset.indices("train")
    if treino.size == 0:
        raise InvalidArgumentError("Partição de treino vazia")
    disponiveis = dataset.available_tasks()
    for spec in specs:
        if spec.name not in disponiveis:
            raise InvalidArgumentError(f"Tarefa '{spec.name}' sem rótulos no conjunto de dados")
        if spec.output_dim != dataset.output_dim(spec.name):
            raise InvalidArgumentError(f"Dimensão de saída da tarefa '{spec.name}' difere do vocabulário")

    nomes = [spec.name for spec in specs]
    if "period" in nomes and dataset.period_stats is None:
        if fit_period_stats(dataset) is None:
            raise InvalidArgumentError("Nenhum período rotulado na partição de treino")
    tem_validacao = dataset.indices("val").size > 0

    modelo = build_model(dataset.dim, config.hidden, specs, config.seed)
    modelo.metadata = _metadados_modelo(dataset, config)
    estado = init_optimizer_state(modelo.parameters())
    rng = np.random.default_rng([config.seed, 2])
    historico = TrainLog(task_names=nomes)
    melhor: Optional[MultiTaskModel] = None
    melhor_total = np.inf

    for epoca in range(1, config.epochs + 1):
        inicio = time.perf_counter()
        ordem = rng.permutation(treino) if config.shuffle else treino
        soma_brutas = np.zeros(len(specs))
        for posicao in range(0, ordem.size, config.batch_size):
            linhas = ordem[posicao:posicao + config.batch_size]
            decomposicao = backward_update(modelo, make_batch(dataset, linhas, nomes), estado,
                                           config.lr, config.momentum)
            soma_brutas += decomposicao.per_task_raw * linhas.size
        perdas_treino = _recompor(soma_brutas / ordem.size, modelo.task_specs)

        perdas_validacao = evaluate_losses(modelo, dataset, "val") if tem_validacao else None
        if config.calibration == "after-warmup" and epoca == 1:
            if perdas_validacao is None:
                print("Aviso: calibração ignorada (partição de validação vazia)", file=sys.stderr)
            elif np.all(perdas_validacao.per_task_raw > 0):
                w, s = calibrate_weights_scales(perdas_validacao.per_task_raw,
                                                [spec.kind for spec in modelo.task_specs],
                                                config.calibration_policy)
                modelo.task_specs = [spec.with_weight_scale(float(wi), float(si))
                                     for spec, wi, si in zip(modelo.task_specs, w, s)]
                perdas_validacao = _recompor(perdas_validacao.per_task_raw, modelo.task_specs)
                historico.calibrated_at = epoca
            else:
                print("Aviso: calibração ignorada (perda de validação nula em alguma tarefa)",
                      file=sys.stderr)

        segundos = time.perf_counter() - inicio
        historico.epochs.append(EpochRecord(epoca, perdas_treino, perdas_validacao, segundos))

        criterio = perdas_validacao.total if perdas_validacao is not None else perdas_treino.total
        if melhor is None or criterio < melhor_total:
            melhor, melhor_total = modelo.copy(), criterio
            historico.best_epoch = epoca

        if verbose:
            print(formatar_linha_epoca(epoca, nomes, perdas_treino.per_task_raw, perdas_treino.total,
                                       segundos, None if perdas_validacao is None else perdas_validacao.total),
                  file=sys.stderr)

    historico.weights = [spec.weight for spec in modelo.task_specs]
    historico.scales = [spec.scale for spec in modelo.task_specs]
    return melhor, historico


# ---------------------------------------------------------------------------
# Avaliação
# ---------------------------------------------------------------------------

def _metrica_ou_none(funcao, *args) -> Optional[float]:
    try:
        return funcao(*args)
    except UndefinedMetricError:
        return None


def evaluate_predictions(outputs: Sequence[np.ndarray], dataset: FeatureDataset, indices: np.ndarray,
                         specs: Sequence[TaskSpec], particao: str = "test",
                         include_label_map: bool = False) -> MetricsReport:
    """
    Calcula as métricas de cada tarefa a partir de saídas já calculadas.

    Args:
        outputs: Uma matriz [len(indices) × K_i] por tarefa, na ordem de specs
        dataset: Conjunto com os rótulos verdadeiros
        indices: Linhas avaliadas
        specs: Tarefas avaliadas
        particao: Nome da partição para o relatório
        include_label_map: Inclui o MAP por rótulo nas tarefas multilabel
    """
    relatorio = MetricsReport(split=particao, n_samples=int(len(indices)))
    for spec, saida in zip(specs, outputs):
        alvo, mascara = dataset.task_targets(spec.name, indices)
        metricas: Dict[str, Optional[float]] = {}
        if spec.kind == "multiclass":
            pontuacoes, verdade = saida[mascara], alvo[mascara]
            for k in TOP_K_PADRAO:
                metricas[f"top{k}"] = _metrica_ou_none(topk_accuracy, pontuacoes, verdade, min(k, spec.output_dim))
            if verdade.size:
                rotulos = dataset.vocabularies[spec.name].labels if spec.name in dataset.vocabularies else None
                relatorio.confusion_matrices[spec.name] = confusion_matrix(
                    np.argmax(pontuacoes, axis=1), verdade, spec.output_dim, rotulos)
        elif spec.kind == "multilabel":
            metricas["map"] = _metrica_ou_none(sample_map, saida, alvo)
            if include_label_map:
                metricas["label_map"] = _metrica_ou_none(calcular_label_map, saida, alvo)
        else:
            media, desvio = dataset.period_stats
            previsto = saida.reshape(-1)[mascara].astype(np.float64)
            verdade = alvo[mascara].astype(np.float64)
            anos_verdadeiros = dataset.labels[spec.name][indices][mascara]
            metricas["mae_years"] = _metrica_ou_none(mae_years, previsto, verdade, media, desvio)
            metricas["interval_accuracy"] = _metrica_ou_none(
                interval_accuracy, previsto * desvio + media, anos_verdadeiros, TOLERANCIA_PERIODO_ANOS)
        relatorio.tasks[spec.name] = metricas
    return relatorio


def evaluate_epoch(model: MultiTaskModel, dataset: FeatureDataset, particao: str = "test",
                   specs: Optional[Sequence[TaskSpec]] = None,
                   include_label_map: bool = False) -> MetricsReport:
    """
    Avalia o modelo em uma partição com uma única passada, sem alterar parâmetros.

    Raises:
        InvalidArgumentError: Partição vazia
    """
    linhas = dataset.indices(particao)
    if linhas.size == 0:
        raise InvalidArgumentError(f"Partição '{particao}' vazia")
    if specs is not None:
        modelo = model.subset([model.task_names.index(spec.name) for spec in specs])
    else:
        modelo = model
    if "period" in modelo.task_names and dataset.period_stats is None:
        estatisticas = model.metadata.get("period_stats")
        if estatisticas is None:
            raise InvalidArgumentError("Estatísticas de período ausentes no modelo")
        dataset.period_stats = tuple(estatisticas)
    saidas = predict(modelo, dataset.features[linhas])
    return evaluate_predictions(saidas, dataset, linhas, modelo.task_specs, particao, include_label_map)


# ---------------------------------------------------------------------------
# Benchmark
# ---------------------------------------------------------------------------

@dataclass
class BenchmarkReport:
    mode: str
    task_names: List[str]
    input_dim: int
    hidden_dim: int
    output_dims: List[int]
    n_batches: int
    batch_size: int
    multi_seconds: float
    single_seconds: List[float]
    flop_ratio: float

    @property
    def measured_ratio(self) -> float:
        return float(sum(self.single_seconds) / self.multi_seconds)

    def to_dict(self) -> Dict[str, Any]:
        dados = asdict(self)
        dados["measured_ratio"] = self.measured_ratio
        return dados

    def save(self, path: Caminho) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)
            f.write("\n")


def _alvos_aleatorios(spec: TaskSpec, B: int, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == "multiclass":
        return rng.integers(0, spec.output_dim, size=B)
    if spec.kind == "multilabel":
        return (rng.random((B, spec.output_dim)) < 0.1).astype(np.float32)
    return rng.normal(size=B).astype(np.float32)


def benchmark_multitask_vs_single(features: np.ndarray, specs: Sequence[TaskSpec], config: TrainConfig,
                                  n_batches: int, mode: str = "eval") -> BenchmarkReport:
    """
    Mede uma passada multitarefa contra a soma das passadas de tarefa única.

    Na passada de tarefa única o tronco é recalculado para cada tarefa. Cada
    configuração é aquecida com 3 passadas descartadas sobre todos os lotes
    antes da medição.

    Args:
        features: Matriz [N × D] de onde os lotes são sorteados
        specs: Tarefas (ao menos duas)
        config: batch_size, hidden e seed são usados
        n_batches: Número de lotes medidos
        mode: "eval" (passe direto) ou "train" (passes direto e reverso)

    Raises:
        InvalidArgumentError: Menos de duas tarefas, n_batches < 1 ou modo desconhecido
    """
    if len(specs) < 2:
        raise InvalidArgumentError("O benchmark exige ao menos duas tarefas")
    if n_batches < 1:
        raise InvalidArgumentError(f"Número de lotes deve ser ao menos 1, recebido {n_batches}")
    if mode not in MODOS_BENCHMARK:
        raise InvalidArgumentError(f"Modo de benchmark desconhecido: '{mode}'")
    entrada = np.asarray(features, dtype=np.float32)
    if entrada.ndim != 2 or entrada.shape[0] < 1:
        raise InvalidArgumentError("Características do benchmark devem ser uma matriz não vazia")

    modelo = build_model(entrada.shape[1], config.hidden, specs, config.seed)
    rng = np.random.default_rng([config.seed, 3])
    B = config.batch_size
    lotes = [Batch(entrada[rng.integers(0, entrada.shape[0], size=B)],
                   [_alvos_aleatorios(spec, B, rng) for spec in specs])
             for _ in range(n_batches)]

    def medir(submodelo: MultiTaskModel, indices_tarefas: Sequence[int]) -> float:
        def passe(lote: Batch):
            if mode == "eval":
                forward_all_tasks(submodelo, lote.inputs)
            else:
                compute_gradients(submodelo, Batch(lote.inputs, [lote.targets[i] for i in indices_tarefas]))

        for _ in range(BENCH_PASSES_AQUECIMENTO):
            for lote in lotes:
                passe(lote)
        inicio = time.perf_counter()
        for lote in lotes:
            passe(lote)
        return time.perf_counter() - inicio

    todas = list(range(len(specs)))
    multi = medir(modelo, todas)
    isoladas = [medir(modelo.subset([i]), [i]) for i in todas]
    razao_flops = sum(single_task_flop_count(modelo, i) for i in todas) / flop_count(modelo)

    return BenchmarkReport(
        mode=mode,
        task_names=[spec.name for spec in specs],
        input_dim=modelo.input_dim,
        hidden_dim=modelo.hidden_dim,
        output_dims=[spec.output_dim for spec in specs],
        n_batches=n_batches,
        batch_size=B,
        multi_seconds=multi,
        single_seconds=isoladas,
        flop_ratio=float(razao_flops),
    )
