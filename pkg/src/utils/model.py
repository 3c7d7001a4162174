"""
Módulo do modelo multitarefa.

Monta a rede (camada compartilhada retificada + uma cabeça linear por tarefa),
calcula a perda combinada L_t = Σ w_i·s_i·L_i, executa os passes conjuntos direto
e reverso, calibra pesos e escalas das tarefas, conta operações e lê/grava
checkpoints no formato OMTL.
"""

import json
import math
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import (
    MAGIC_CHECKPOINT,
    VERSAO_CHECKPOINT,
    TIPOS_TAREFA,
    POLITICAS_CALIBRACAO,
)
from .excecoes import FormatError, InvalidArgumentError
from .nncore import (
    Batch,
    DenseLayer,
    GradientBundle,
    OptimizerState,
    dense_backward,
    dense_forward,
    init_dense_layer,
    mae_loss,
    optimizer_step,
    relu,
    sigmoid_bce,
    softmax_xent,
)


@dataclass
class TaskSpec:
    """
    Especificação de uma tarefa.

    Attributes:
        name: Nome da tarefa (artist, type, material, period)
        kind: multiclass | multilabel | regression
        output_dim: K_i (1 para regressão)
        weight: Peso w_i da perda combinada
        scale: Escala s_i da perda combinada
        class_weights: Pesos por classe (apenas multiclass)
    """
    name: str
    kind: str
    output_dim: int
    weight: float = 1.0
    scale: float = 1.0
    class_weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in TIPOS_TAREFA:
            raise InvalidArgumentError(f"Tipo de tarefa desconhecido: '{self.kind}'")
        if self.output_dim < 1:
            raise InvalidArgumentError(f"Tarefa '{self.name}' com dimensão de saída {self.output_dim}")
        if self.kind == "regression" and self.output_dim != 1:
            raise InvalidArgumentError(f"Tarefa de regressão '{self.name}' deve ter K = 1")
        if not self.weight >= 0:
            raise InvalidArgumentError(f"Peso da tarefa '{self.name}' deve ser não negativo")
        if not self.scale > 0:
            raise InvalidArgumentError(f"Escala da tarefa '{self.name}' deve ser positiva")
        if self.class_weights is not None:
            if self.kind != "multiclass":
                raise InvalidArgumentError("Pesos por classe só se aplicam a tarefas multiclass")
            self.class_weights = np.asarray(self.class_weights, dtype=np.float64)
            if self.class_weights.shape != (self.output_dim,) or np.any(self.class_weights < 0):
                raise InvalidArgumentError(
                    f"Pesos por classe da tarefa '{self.name}' devem ter {self.output_dim} entradas não negativas"
                )

    def with_weight_scale(self, weight: float, scale: float) -> "TaskSpec":
        return TaskSpec(self.name, self.kind, self.output_dim, weight, scale,
                        None if self.class_weights is None else self.class_weights.copy())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "kind": self.kind,
            "output_dim": self.output_dim,
            "weight": float(self.weight),
            "scale": float(self.scale),
            "class_weights": None if self.class_weights is None else [float(v) for v in self.class_weights],
        }

    @classmethod
    def from_dict(cls, dados: Dict[str, Any]) -> "TaskSpec":
        return cls(
            name=dados["name"],
            kind=dados["kind"],
            output_dim=int(dados["output_dim"]),
            weight=float(dados.get("weight", 1.0)),
            scale=float(dados.get("scale", 1.0)),
            class_weights=dados.get("class_weights"),
        )


@dataclass(eq=False)
class MultiTaskModel:
    """
    Rede com compartilhamento rígido de parâmetros.

    Attributes:
        shared: Camada compartilhada D→H (ativação retificada)
        heads: Uma camada linear H→K_i por tarefa
        task_specs: Especificações, na ordem das cabeças
        metadata: Informações carregadas no checkpoint (vocabulários, estatísticas)
    """
    shared: DenseLayer
    heads: List[DenseLayer]
    task_specs: List[TaskSpec]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.heads) != len(self.task_specs):
            raise InvalidArgumentError("Número de cabeças difere do número de tarefas")
        for cabeca, spec in zip(self.heads, self.task_specs):
            if cabeca.in_dim != self.shared.out_dim or cabeca.out_dim != spec.output_dim:
                raise InvalidArgumentError(f"Cabeça da tarefa '{spec.name}' com dimensões inválidas")

    @property
    def input_dim(self) -> int:
        return self.shared.in_dim

    @property
    def hidden_dim(self) -> int:
        return self.shared.out_dim

    @property
    def dtype(self):
        return self.shared.weights.dtype

    @property
    def task_names(self) -> List[str]:
        return [spec.name for spec in self.task_specs]

    def parameters(self) -> List[np.ndarray]:
        """Arrays treináveis na ordem [W_c, b_c, W_1, b_1, ...]."""
        params = [self.shared.weights, self.shared.bias]
        for cabeca in self.heads:
            params.extend([cabeca.weights, cabeca.bias])
        return params

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.parameters()))

    def copy(self) -> "MultiTaskModel":
        return MultiTaskModel(
            self.shared.copy(),
            [cabeca.copy() for cabeca in self.heads],
            [spec.with_weight_scale(spec.weight, spec.scale) for spec in self.task_specs],
            json.loads(json.dumps(self.metadata)),
        )

    def subset(self, indices: Sequence[int]) -> "MultiTaskModel":
        """Visão com apenas as cabeças indicadas (arrays compartilhados, sem cópia)."""
        return MultiTaskModel(self.shared, [self.heads[i] for i in indices],
                              [self.task_specs[i] for i in indices], self.metadata)


@dataclass
class LossBreakdown:
    """
    Decomposição da perda combinada.

    Attributes:
        per_task_raw: L_i
        per_task_weighted: w_i·s_i·L_i
        total: L_t
    """
    per_task_raw: np.ndarray
    per_task_weighted: np.ndarray
    total: float

    def to_dict(self, names: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        nomes = list(names) if names is not None else [str(i) for i in range(len(self.per_task_raw))]
        return {
            "raw": {n: float(v) for n, v in zip(nomes, self.per_task_raw)},
            "weighted": {n: float(v) for n, v in zip(nomes, self.per_task_weighted)},
            "total": float(self.total),
        }

    @classmethod
    def from_dict(cls, dados: Dict[str, Any]) -> "LossBreakdown":
        return cls(np.array(list(dados["raw"].values()), dtype=np.float64),
                   np.array(list(dados["weighted"].values()), dtype=np.float64),
                   float(dados["total"]))


def _semente_cabeca(seed: int, nome: str) -> np.random.Generator:
    # Cada cabeça tem seu próprio fluxo, independente das demais tarefas
    return np.random.default_rng([seed, 1 + zlib.crc32(nome.encode("utf-8"))])


def build_model(D: int, H: int, specs: Sequence[TaskSpec], seed: int,
                dtype=np.float32) -> MultiTaskModel:
    """
    Constrói o modelo multitarefa.

    Args:
        D: Dimensão das características de entrada
        H: Unidades da camada compartilhada
        specs: Especificações das tarefas (não vazia)
        seed: Semente do gerador pseudoaleatório
        dtype: np.float32 para treino, np.float64 para verificação de gradiente

    Returns:
        Modelo com D·H + H + Σ (H·K_i + K_i) parâmetros treináveis

    Raises:
        InvalidArgumentError: Lista de tarefas vazia ou dimensões < 1
    """
    if not specs:
        raise InvalidArgumentError("É necessária ao menos uma tarefa para construir o modelo")
    if D < 1 or H < 1:
        raise InvalidArgumentError(f"Dimensões inválidas: D={D}, H={H}")
    nomes = [spec.name for spec in specs]
    if len(set(nomes)) != len(nomes):
        raise InvalidArgumentError(f"Nomes de tarefa repetidos: {nomes}")

    compartilhada = init_dense_layer(D, H, np.random.default_rng([seed, 0]), dtype)
    cabecas = [init_dense_layer(H, spec.output_dim, _semente_cabeca(seed, spec.name), dtype)
               for spec in specs]
    return MultiTaskModel(compartilhada, cabecas, list(specs))


def forward_all_tasks(model: MultiTaskModel, x: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray]]:
    """
    Passe direto conjunto: o tronco é calculado uma única vez por lote.

    Returns:
        Tupla (ativações compartilhadas [B × H], saídas por tarefa [B × K_i])
    """
    entrada = np.asarray(x, dtype=model.dtype)
    ativacoes = relu(dense_forward(model.shared, entrada))
    saidas = [dense_forward(cabeca, ativacoes) for cabeca in model.heads]
    return ativacoes, saidas


def task_loss(spec: TaskSpec, output: np.ndarray, target: np.ndarray,
              mask: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
    """
    Perda bruta L_i de uma tarefa, considerando apenas as linhas rotuladas.

    Returns:
        Tupla (perda, gradiente com a forma de output); (0, zeros) sem linhas rotuladas
    """
    if mask is not None and not np.all(mask):
        grad = np.zeros_like(output)
        if not np.any(mask):
            return 0.0, grad
        perda, grad_parcial = task_loss(spec, output[mask], target[mask])
        grad[mask] = grad_parcial
        return perda, grad

    if spec.kind == "multiclass":
        return softmax_xent(output, target, spec.class_weights)
    if spec.kind == "multilabel":
        alvo = np.asarray(target)
        if np.any((alvo != 0) & (alvo != 1)):
            raise InvalidArgumentError(f"Alvos multi-hot da tarefa '{spec.name}' devem ser 0 ou 1")
        return sigmoid_bce(output, alvo)
    return mae_loss(output, target)


def combined_loss(per_task: Sequence[Tuple[float, np.ndarray]],
                  specs: Sequence[TaskSpec]) -> Tuple[LossBreakdown, List[np.ndarray]]:
    """
    Perda combinada L_t = Σ w_i·s_i·L_i.

    Args:
        per_task: (perda, gradiente) de cada tarefa, na ordem de specs
        specs: Especificações com w_i e s_i

    Returns:
        Tupla (decomposição, gradientes que entram em cada cabeça multiplicados por w_i·s_i)

    Raises:
        InvalidArgumentError: Se o número de entradas diferir do número de tarefas
    """
    if len(per_task) != len(specs):
        raise InvalidArgumentError(f"Recebidas {len(per_task)} perdas para {len(specs)} tarefas")
    fatores = np.array([spec.weight * spec.scale for spec in specs], dtype=np.float64)
    brutas = np.array([perda for perda, _ in per_task], dtype=np.float64)
    ponderadas = fatores * brutas
    gradientes = [grad * grad.dtype.type(fator) for (_, grad), fator in zip(per_task, fatores)]
    return LossBreakdown(brutas, ponderadas, float(np.sum(ponderadas))), gradientes


def compute_gradients(model: MultiTaskModel, batch: Batch) -> Tuple[LossBreakdown, GradientBundle]:
    """
    Passe direto e reverso conjunto.

    Os gradientes que chegam à camada compartilhada são a soma das contribuições
    de todas as cabeças.

    Returns:
        Tupla (decomposição da perda, gradientes na ordem de model.parameters())
    """
    if len(batch.targets) != len(model.task_specs):
        raise InvalidArgumentError(
            f"Lote com {len(batch.targets)} alvos para {len(model.task_specs)} tarefas"
        )
    entrada = np.asarray(batch.inputs, dtype=model.dtype)
    ativacoes, saidas = forward_all_tasks(model, entrada)
    por_tarefa = [task_loss(spec, saida, alvo, batch.mask(i))
                  for i, (spec, saida, alvo) in enumerate(zip(model.task_specs, saidas, batch.targets))]
    decomposicao, gradientes_saida = combined_loss(por_tarefa, model.task_specs)

    grad_ativacoes = np.zeros_like(ativacoes)
    grads_cabecas: List[np.ndarray] = []
    for cabeca, grad_saida in zip(model.heads, gradientes_saida):
        grad_x, grad_w, grad_b = dense_backward(cabeca, ativacoes, grad_saida)
        grad_ativacoes += grad_x
        grads_cabecas.extend([grad_w, grad_b])

    # ReLU: a ativação é positiva exatamente onde a pré-ativação é positiva
    grad_pre = grad_ativacoes * (ativacoes > 0)
    _, grad_w_c, grad_b_c = dense_backward(model.shared, entrada, grad_pre)
    return decomposicao, [grad_w_c, grad_b_c] + grads_cabecas


def backward_update(model: MultiTaskModel, batch: Batch, state: OptimizerState,
                    lr: float, momentum: float = 0.9) -> LossBreakdown:
    """
    Um passo de treinamento conjunto sobre a camada compartilhada e as cabeças.

    Returns:
        Decomposição da perda calculada antes da atualização
    """
    decomposicao, grads = compute_gradients(model, batch)
    optimizer_step(model.parameters(), grads, state, lr, momentum)
    return decomposicao


def model_closure(model: MultiTaskModel, batch: Batch):
    """Closure (perda total, gradientes) para grad_check sobre model.parameters()."""
    def closure():
        decomposicao, grads = compute_gradients(model, batch)
        return decomposicao.total, grads
    return closure


def calibrate_weights_scales(validation_losses: Sequence[float], kinds: Sequence[str],
                             policy: str = "ratio") -> Tuple[np.ndarray, np.ndarray]:
    """
    Calibra pesos w_i e escalas s_i a partir das perdas de validação.

    Escalas: 1 para classificação; a regressão recebe a potência de dez mais próxima
    de (mediana das perdas de classificação) / L_regressão. Pesos: mediana das perdas
    escaladas dividida por s_i·L_i, normalizados para somar o número de tarefas.

    Args:
        validation_losses: L_i de validação, todas positivas
        kinds: Tipo de cada tarefa
        policy: "ratio" (escalas e pesos) ou "scale-only" (pesos iguais a 1)

    Returns:
        Tupla (w, s)

    Raises:
        InvalidArgumentError: Perda não positiva, tamanhos divergentes ou política desconhecida

    Examples:
        >>> w, s = calibrate_weights_scales([0.7, 0.8, 7.0], ["multiclass", "multilabel", "regression"])
        >>> float(s[2])
        0.1
    """
    perdas = np.asarray(validation_losses, dtype=np.float64)
    if perdas.shape != (len(kinds),):
        raise InvalidArgumentError("Uma perda de validação por tarefa é necessária")
    if perdas.size == 0:
        raise InvalidArgumentError("Nenhuma perda de validação informada")
    if not np.all(np.isfinite(perdas)) or np.any(perdas <= 0):
        raise InvalidArgumentError(f"Perdas de validação devem ser positivas: {perdas.tolist()}")
    if policy not in POLITICAS_CALIBRACAO:
        raise InvalidArgumentError(f"Política de calibração desconhecida: '{policy}'")

    regressao = np.array([tipo == "regression" for tipo in kinds])
    escalas = np.ones_like(perdas)
    if np.any(regressao) and np.any(~regressao):
        mediana_classificacao = float(np.median(perdas[~regressao]))
        for i in np.flatnonzero(regressao):
            expoente = round(math.log10(mediana_classificacao / perdas[i]))
            escalas[i] = 10.0 ** expoente

    if policy == "scale-only":
        return np.ones_like(perdas), escalas

    escaladas = escalas * perdas
    pesos = float(np.median(escaladas)) / escaladas
    pesos *= len(pesos) / pesos.sum()
    return pesos, escalas


def flop_count(model: MultiTaskModel, n_tasks_evaluated: Optional[int] = None, B: int = 1) -> int:
    """
    Multiplicações-acumulações de uma avaliação multitarefa.

    B·(D·H + Σ H·K_i) sobre as primeiras n_tasks_evaluated cabeças; o tronco é contado
    uma única vez.
    """
    n = len(model.heads) if n_tasks_evaluated is None else n_tasks_evaluated
    if not 0 <= n <= len(model.heads):
        raise InvalidArgumentError(f"Número de tarefas avaliadas fora do intervalo: {n}")
    D, H = model.input_dim, model.hidden_dim
    cabecas = sum(H * cabeca.out_dim for cabeca in model.heads[:n])
    return int(B * (D * H + cabecas))


def single_task_flop_count(model: MultiTaskModel, task_index: int, B: int = 1) -> int:
    """Custo de avaliar uma única tarefa recalculando o tronco."""
    return int(B * (model.input_dim * model.hidden_dim
                    + model.hidden_dim * model.heads[task_index].out_dim))


# ---------------------------------------------------------------------------
# Checkpoint OMTL
# ---------------------------------------------------------------------------

def save_checkpoint(model: MultiTaskModel, path: Union[str, Path]) -> None:
    """
    Grava o modelo no formato OMTL.

    Layout: "OMTL", versão u32, D u32, H u32, n u32, K_i u32..., parâmetros float32
    little-endian em ordem row-major, trailer JSON UTF-8 com as tarefas.
    """
    dims = [model.input_dim, model.hidden_dim, len(model.heads)] + [c.out_dim for c in model.heads]
    cabecalho = MAGIC_CHECKPOINT + struct.pack(f"<I{len(dims)}I", VERSAO_CHECKPOINT, *dims)
    trailer = json.dumps(
        {"task_specs": [spec.to_dict() for spec in model.task_specs], "metadata": model.metadata},
        sort_keys=True, ensure_ascii=False,
    ).encode("utf-8")

    with open(path, "wb") as f:
        f.write(cabecalho)
        for p in model.parameters():
            f.write(np.ascontiguousarray(p, dtype="<f4").tobytes())
        f.write(trailer)


def load_checkpoint(path: Union[str, Path]) -> MultiTaskModel:
    """
    Carrega um modelo gravado por save_checkpoint (cópia bit a bit dos parâmetros).

    Raises:
        FileNotFoundError: Se o arquivo não existir
        FormatError: Magic, versão, tamanho ou trailer inválidos
    """
    caminho = Path(path)
    if not caminho.exists():
        raise FileNotFoundError(f"Checkpoint não encontrado: {caminho}")
    dados = caminho.read_bytes()

    if len(dados) < 20 or dados[:4] != MAGIC_CHECKPOINT:
        raise FormatError("Magic do checkpoint inválido", offset=0)
    versao, D, H, n = struct.unpack_from("<4I", dados, 4)
    if versao != VERSAO_CHECKPOINT:
        raise FormatError(f"Versão de checkpoint não suportada: {versao}", offset=4)
    if D < 1 or H < 1 or n < 1:
        raise FormatError(f"Dimensões inválidas no checkpoint: D={D}, H={H}, n={n}", offset=8)
    posicao = 20
    if len(dados) < posicao + 4 * n:
        raise FormatError("Checkpoint truncado nas dimensões das tarefas", offset=len(dados))
    saidas = struct.unpack_from(f"<{n}I", dados, posicao)
    posicao += 4 * n

    formas = [(H, D), (H,)]
    for K in saidas:
        formas.extend([(K, H), (K,)])
    arrays = []
    for forma in formas:
        quantidade = int(np.prod(forma))
        fim = posicao + 4 * quantidade
        if fim > len(dados):
            raise FormatError("Checkpoint truncado nos parâmetros", offset=len(dados))
        arrays.append(np.frombuffer(dados, dtype="<f4", count=quantidade, offset=posicao)
                      .reshape(forma).astype(np.float32))
        posicao = fim

    try:
        trailer = json.loads(dados[posicao:].decode("utf-8"))
        specs = [TaskSpec.from_dict(d) for d in trailer["task_specs"]]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise FormatError(f"Trailer JSON do checkpoint inválido: {e}", offset=posicao)
    except (InvalidArgumentError, ValueError) as e:
        # Tipo, dimensão ou peso fora do domínio vindo do arquivo é erro de formato
        raise FormatError(f"Tarefa inválida no trailer do checkpoint: {e}", offset=posicao)
    if [spec.output_dim for spec in specs] != list(saidas):
        raise FormatError("Tarefas do trailer não correspondem às dimensões do cabeçalho", offset=posicao)

    compartilhada = DenseLayer(arrays[0], arrays[1])
    cabecas = [DenseLayer(arrays[2 + 2 * i], arrays[3 + 2 * i]) for i in range(n)]
    return MultiTaskModel(compartilhada, cabecas, specs, trailer.get("metadata", {}))
