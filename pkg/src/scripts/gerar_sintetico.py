#!/usr/bin/env python3
"""
Script de geração de dados sintéticos para o motor multitarefa.

Gera uma matriz de características (OMFT) e os metadados correspondentes (JSON
Lines) com artistas cujos períodos, tipos e materiais seguem o artista com a
probabilidade dada pelo entrelaçamento.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Adicionar a raiz do repositório ao path para imports
sys.path.append(str(Path(__file__).parent.parent.parent))

from src.config import CODIGO_SUCESSO, SEMENTE_PADRAO
from src.scripts.comum import criar_parser, rodar
from src.utils.data import generate_synthetic, write_feature_matrix, write_metadata


def cmd_synth(args: argparse.Namespace) -> int:
    """Gera e grava o conjunto sintético."""
    print(f"Gerando {args.classes} artistas × {args.per_class} obras (D={args.dim}, "
          f"entrelaçamento={args.entanglement})...")
    dataset = generate_synthetic(args.classes, args.per_class, args.dim, args.entanglement, args.seed)

    Path(args.out_features).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out_meta).parent.mkdir(parents=True, exist_ok=True)
    write_feature_matrix(args.out_features, dataset.features)
    write_metadata(args.out_meta, dataset.records)

    print(f"✓ Características salvas em {args.out_features} ({dataset.n_samples} × {dataset.dim})")
    print(f"✓ Metadados salvos em {args.out_meta}")
    return CODIGO_SUCESSO


def construir_parser() -> argparse.ArgumentParser:
    parser = criar_parser(
        "Gera características e metadados sintéticos com tarefas entrelaçadas",
        "  python gerar_sintetico.py --out-features dados/feat.omft --out-meta dados/meta.jsonl\n"
        "  python gerar_sintetico.py --classes 20 --per-class 200 --entanglement 1 --seed 7 "
        "--out-features f.omft --out-meta m.jsonl",
    )
    parser.add_argument("--classes", type=int, default=20, help="Número de artistas (padrão: 20)")
    parser.add_argument("--per-class", type=int, default=50, help="Obras por artista (padrão: 50)")
    parser.add_argument("--dim", type=int, default=32, help="Dimensão das características (padrão: 32)")
    parser.add_argument("--entanglement", type=float, default=0.9,
                        help="Probabilidade de cada atributo seguir o artista, em [0, 1] (padrão: 0.9)")
    parser.add_argument("--seed", type=int, default=SEMENTE_PADRAO, help="Semente (padrão: 42)")
    parser.add_argument("--out-features", required=True, help="Arquivo de características OMFT")
    parser.add_argument("--out-meta", required=True, help="Arquivo de metadados JSON Lines")
    return parser


def main(argv: Optional[List[str]] = None):
    """Função principal do script."""
    sys.exit(rodar(construir_parser(), cmd_synth, argv))


if __name__ == "__main__":
    main()
