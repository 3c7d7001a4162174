#!/usr/bin/env python3
"""
Script de divisão estratificada dos dados.

Lê os metadados, constrói o vocabulário da tarefa âncora e grava a atribuição
de cada amostra a treino, validação, teste ou excluída. Opcionalmente mostra o
número de classes que sobrevivem a cada limiar de amostras por classe.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Adicionar a raiz do repositório ao path para imports
sys.path.append(str(Path(__file__).parent.parent.parent))

from src.config import (
    CODIGO_SUCESSO,
    MIN_AMOSTRAS_ROTULO,
    SEMENTE_PADRAO,
    TAREFA_ANCORA_PADRAO,
    TAREFAS,
)
from src.scripts.comum import criar_parser, rodar
from src.utils.data import (
    anchor_excluded,
    anchor_ids,
    build_label_vocab,
    cohort_sizes,
    read_metadata,
    stratify_labels,
)
from src.utils.excecoes import InvalidArgumentError
from src.utils.parser import parsear_lista_inteiros, parsear_proporcoes
from src.utils.validacao import validar_proporcoes


def cmd_split(args: argparse.Namespace) -> int:
    """Divide os dados por classe da tarefa âncora e grava o arquivo de divisão."""
    if TAREFAS.get(args.anchor_task, ("",))[0] != "multiclass":
        raise InvalidArgumentError(f"Tarefa âncora '{args.anchor_task}' deve ser multiclass")
    proporcoes = parsear_proporcoes(args.ratios)
    valido, erro = validar_proporcoes(list(proporcoes))
    if not valido:
        raise InvalidArgumentError(f"Proporções inválidas: {erro}")
    registros = read_metadata(args.meta)
    print(f"Lidos {len(registros)} registros de {args.meta}")

    incluidos = [r for r in registros if not anchor_excluded(r, args.anchor_task)]
    if args.cohorts:
        for limiar, tamanho in cohort_sizes(incluidos, args.anchor_task, parsear_lista_inteiros(args.cohorts)).items():
            print(f"  ≥ {limiar:5d} amostras: {tamanho} classes")

    vocabulario = build_label_vocab(incluidos, args.anchor_task, args.min_samples)
    divisao = stratify_labels([r["id"] for r in registros],
                              anchor_ids(registros, vocabulario, args.anchor_task),
                              proporcoes, args.seed, vocabulario.labels)

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    divisao.save(args.out)

    contagens = divisao.counts()
    print(f"✓ Divisão salva em {args.out} ({len(vocabulario)} classes de '{args.anchor_task}')")
    for particao in ("train", "val", "test", "excluded"):
        print(f"  {particao:<9} {contagens.get(particao, 0)}")
    return CODIGO_SUCESSO


def construir_parser() -> argparse.ArgumentParser:
    parser = criar_parser(
        "Divide as amostras em treino/validação/teste por classe da tarefa âncora",
        "  python dividir_dados.py --meta meta.jsonl --out splits.json\n"
        "  python dividir_dados.py --meta meta.jsonl --ratios 0.7,0.2,0.1 --min-samples 10 "
        "--cohorts 1100,500,300,100 --out splits.json",
    )
    parser.add_argument("--meta", required=True, help="Arquivo de metadados JSON Lines")
    parser.add_argument("--anchor-task", default=TAREFA_ANCORA_PADRAO,
                        help="Tarefa cujas classes definem a estratificação (padrão: artist)")
    parser.add_argument("--ratios", default="0.7,0.2,0.1", help="Proporções treino,validação,teste")
    parser.add_argument("--min-samples", type=int, default=MIN_AMOSTRAS_ROTULO,
                        help="Mínimo de amostras para uma classe entrar no vocabulário (padrão: 1)")
    parser.add_argument("--seed", type=int, default=SEMENTE_PADRAO, help="Semente (padrão: 42)")
    parser.add_argument("--cohorts", help="Limiares para a contagem de classes, ex.: 1100,500,300,100")
    parser.add_argument("--out", required=True, help="Arquivo JSON de saída")
    return parser


def main(argv: Optional[List[str]] = None):
    """Função principal do script."""
    sys.exit(rodar(construir_parser(), cmd_split, argv))


if __name__ == "__main__":
    main()
