#!/usr/bin/env python3
"""
Script de benchmark multitarefa x tarefa única.

Compara o tempo de uma passada multitarefa (tronco calculado uma vez por lote)
com a soma das passadas de tarefa única (tronco recalculado por tarefa) e mostra
a razão analítica de operações.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

# Adicionar a raiz do repositório ao path para imports
sys.path.append(str(Path(__file__).parent.parent.parent))

from src.config import (
    BENCH_DIM_CARACTERISTICAS,
    BENCH_DIMS_TAREFAS,
    BENCH_LOTES,
    BENCH_OCULTA,
    BENCH_TAMANHO_LOTE,
    CODIGO_SUCESSO,
    MODOS_BENCHMARK,
    SEMENTE_PADRAO,
)
from src.scripts.comum import criar_parser, rodar
from src.utils.engine import TrainConfig, benchmark_multitask_vs_single
from src.utils.excecoes import InvalidArgumentError
from src.utils.model import TaskSpec
from src.utils.parser import parsear_lista_inteiros
from src.utils.relatorio import formatar_relatorio_benchmark


def specs_benchmark(dimensoes: List[int]) -> List[TaskSpec]:
    """
    Tarefas do benchmark: a primeira multiclass, K = 1 vira regressão e as demais multilabel.
    """
    specs = []
    for i, K in enumerate(dimensoes):
        if i == 0:
            tipo = "multiclass"
        elif K == 1:
            tipo = "regression"
        else:
            tipo = "multilabel"
        specs.append(TaskSpec(f"task_{i}", tipo, K))
    return specs


def cmd_bench(args: argparse.Namespace) -> int:
    """Executa o benchmark e mostra as razões medida e analítica."""
    if args.features_dims < 1 or args.batch < 1:
        raise InvalidArgumentError("Dimensão das características e tamanho do lote devem ser positivos")
    dimensoes = parsear_lista_inteiros(args.tasks_dims)
    specs = specs_benchmark(dimensoes)
    config = TrainConfig(batch_size=args.batch, hidden=args.hidden, seed=args.seed)
    rng = np.random.default_rng(args.seed)
    features = rng.normal(size=(max(args.batch * 8, 256), args.features_dims)).astype(np.float32)

    relatorio = benchmark_multitask_vs_single(features, specs, config, args.batches, args.mode)
    print(formatar_relatorio_benchmark(relatorio.to_dict()))

    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        relatorio.save(args.out)
        print(f"✓ Resultado salvo em {args.out}")
    return CODIGO_SUCESSO


def construir_parser() -> argparse.ArgumentParser:
    parser = criar_parser(
        "Mede o ganho de tempo da avaliação multitarefa sobre tarefas isoladas",
        "  python medir_desempenho.py\n"
        "  python medir_desempenho.py --features-dims 2048 --tasks-dims 100,50,50,1 --batches 200 --mode train",
    )
    parser.add_argument("--features-dims", type=int, default=BENCH_DIM_CARACTERISTICAS,
                        help="Dimensão D das características (padrão: 2048)")
    parser.add_argument("--tasks-dims", default=",".join(str(k) for k in BENCH_DIMS_TAREFAS),
                        help="Saídas K_i por tarefa (padrão: 100,50,50,1)")
    parser.add_argument("--hidden", type=int, default=BENCH_OCULTA, help="Unidades H (padrão: 512)")
    parser.add_argument("--batches", type=int, default=BENCH_LOTES, help="Lotes medidos (padrão: 200)")
    parser.add_argument("--batch", type=int, default=BENCH_TAMANHO_LOTE, help="Tamanho do lote (padrão: 32)")
    parser.add_argument("--mode", choices=MODOS_BENCHMARK, default="eval",
                        help="eval: passe direto; train: passes direto e reverso")
    parser.add_argument("--seed", type=int, default=SEMENTE_PADRAO, help="Semente (padrão: 42)")
    parser.add_argument("--out", help="Arquivo JSON de saída (opcional)")
    return parser


def main(argv: Optional[List[str]] = None):
    """Função principal do script."""
    sys.exit(rodar(construir_parser(), cmd_bench, argv))


if __name__ == "__main__":
    main()
