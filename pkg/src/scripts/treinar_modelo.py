#!/usr/bin/env python3
"""
Script de treinamento do modelo multitarefa.

Junta características, metadados e divisão, treina as tarefas pedidas com a
perda combinada e grava o checkpoint OMTL e o histórico de treinamento em JSON.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Adicionar a raiz do repositório ao path para imports
sys.path.append(str(Path(__file__).parent.parent.parent))

from src.config import (
    BATCH_PADRAO,
    CODIGO_SUCESSO,
    EPOCAS_PADRAO,
    MIN_AMOSTRAS_ROTULO,
    MODOS_CALIBRACAO,
    MOMENTUM_PADRAO,
    OCULTA_PADRAO,
    POLITICAS_CALIBRACAO,
    SEMENTE_PADRAO,
    TAREFA_ANCORA_PADRAO,
    TAXA_APRENDIZADO_PADRAO,
)
from src.scripts.comum import criar_parser, rodar
from src.utils.data import (
    SplitAssignment,
    apply_split,
    build_dataset,
    fit_period_stats,
    load_feature_matrix,
    read_metadata,
)
from src.utils.engine import TrainConfig, default_task_specs, train
from src.utils.excecoes import InvalidArgumentError
from src.utils.model import save_checkpoint
from src.utils.validacao import validar_lista_tarefas


def carregar_conjunto(caminho_features: str, caminho_meta: str, caminho_splits: str,
                      min_samples: int = MIN_AMOSTRAS_ROTULO, vocabularios=None):
    """
    Carrega características, metadados e divisão em um FeatureDataset.

    Raises:
        FileNotFoundError: Se algum arquivo não existir
        FormatError: Arquivos malformados
        DataMismatchError: Número de linhas diferente entre características e metadados
    """
    features = load_feature_matrix(caminho_features)
    registros = read_metadata(caminho_meta)
    dataset = build_dataset(features, registros, vocabularies=vocabularios,
                            min_samples=min_samples, anchor_task=TAREFA_ANCORA_PADRAO)
    return apply_split(dataset, SplitAssignment.load(caminho_splits))


def cmd_train(args: argparse.Namespace) -> int:
    """Treina o modelo e grava checkpoint e histórico."""
    tarefas = None
    if args.tasks:
        tarefas = [t.strip() for t in args.tasks.split(",") if t.strip()]
        valido, erros = validar_lista_tarefas(tarefas)
        if not valido:
            raise InvalidArgumentError("; ".join(erros))
    config = TrainConfig(
        batch_size=args.batch,
        epochs=args.epochs,
        lr=args.lr,
        momentum=args.momentum,
        seed=args.seed,
        hidden=args.hidden,
        calibration=args.calibrate,
        calibration_policy=args.calibration_policy,
    )

    dataset = carregar_conjunto(args.features, args.meta, args.splits, args.min_samples)
    fit_period_stats(dataset)
    specs = default_task_specs(dataset, tarefas)
    print(f"Treinando {', '.join(s.name for s in specs)} com D={dataset.dim}, H={config.hidden}, "
          f"{len(dataset.indices('train'))} amostras de treino...")

    modelo, historico = train(dataset, specs, config, verbose=not args.quiet)

    for destino in (args.out_model, args.out_log):
        Path(destino).parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(modelo, args.out_model)
    historico.save(args.out_log)

    print(f"✓ Modelo salvo em {args.out_model} (melhor época: {historico.best_epoch})")
    print(f"✓ Histórico salvo em {args.out_log}")
    if historico.calibrated_at is not None:
        pares = ", ".join(f"{n}: w={w:.3g} s={s:.3g}"
                          for n, w, s in zip(historico.task_names, historico.weights, historico.scales))
        print(f"  Calibração após a época {historico.calibrated_at}: {pares}")
    return CODIGO_SUCESSO


def construir_parser() -> argparse.ArgumentParser:
    parser = criar_parser(
        "Treina o modelo multitarefa (camada compartilhada + uma cabeça por tarefa)",
        "  python treinar_modelo.py --features f.omft --meta m.jsonl --splits s.json "
        "--out-model modelo.omtl --out-log log.json\n"
        "  python treinar_modelo.py --features f.omft --meta m.jsonl --splits s.json --tasks artist,period "
        "--hidden 6144 --calibrate after-warmup --out-model m.omtl --out-log l.json",
    )
    parser.add_argument("--features", required=True, help="Arquivo de características OMFT")
    parser.add_argument("--meta", required=True, help="Arquivo de metadados JSON Lines")
    parser.add_argument("--splits", required=True, help="Arquivo de divisão JSON")
    parser.add_argument("--tasks", help="Tarefas separadas por vírgula (padrão: todas com rótulos)")
    parser.add_argument("--hidden", type=int, default=OCULTA_PADRAO, help="Unidades da camada compartilhada")
    parser.add_argument("--batch", type=int, default=BATCH_PADRAO, help="Tamanho do lote (padrão: 32)")
    parser.add_argument("--epochs", type=int, default=EPOCAS_PADRAO, help="Número de épocas (padrão: 30)")
    parser.add_argument("--lr", type=float, default=TAXA_APRENDIZADO_PADRAO, help="Taxa de aprendizado")
    parser.add_argument("--momentum", type=float, default=MOMENTUM_PADRAO, help="Momento do SGD")
    parser.add_argument("--seed", type=int, default=SEMENTE_PADRAO, help="Semente (padrão: 42)")
    parser.add_argument("--min-samples", type=int, default=MIN_AMOSTRAS_ROTULO,
                        help="Mínimo de amostras por classe da tarefa âncora")
    parser.add_argument("--calibrate", choices=MODOS_CALIBRACAO, default="off",
                        help="Calibração de pesos e escalas (padrão: off)")
    parser.add_argument("--calibration-policy", choices=POLITICAS_CALIBRACAO, default="ratio",
                        help="Política de calibração (padrão: ratio)")
    parser.add_argument("--quiet", action="store_true", help="Não mostra o progresso por época")
    parser.add_argument("--out-model", required=True, help="Checkpoint OMTL de saída")
    parser.add_argument("--out-log", required=True, help="Histórico JSON de saída")
    return parser


def main(argv: Optional[List[str]] = None):
    """Função principal do script."""
    sys.exit(rodar(construir_parser(), cmd_train, argv))


if __name__ == "__main__":
    main()
