#!/usr/bin/env python3
"""
Script de avaliação do modelo multitarefa.

Avalia um checkpoint em uma partição e grava o relatório de métricas em JSON,
as matrizes de confusão em CSV e, opcionalmente, uma planilha Excel.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Adicionar a raiz do repositório ao path para imports
sys.path.append(str(Path(__file__).parent.parent.parent))

from src.config import CODIGO_SUCESSO, FORMATO_CSV_CONFUSAO, PARTICOES
from src.scripts.comum import criar_parser, rodar
from src.scripts.treinar_modelo import carregar_conjunto
from src.utils.data import LabelVocabulary
from src.utils.engine import evaluate_epoch
from src.utils.excecoes import DataMismatchError
from src.utils.model import load_checkpoint
from src.utils.relatorio import exportar_relatorio_excel, formatar_relatorio_metricas


def vocabularios_do_modelo(modelo) -> dict:
    """Vocabulários gravados no checkpoint."""
    return {tarefa: LabelVocabulary.from_dict(dados)
            for tarefa, dados in modelo.metadata.get("vocabularies", {}).items()}


def cmd_eval(args: argparse.Namespace) -> int:
    """Avalia o modelo e grava o relatório."""
    modelo = load_checkpoint(args.model)
    dataset = carregar_conjunto(args.features, args.meta, args.splits,
                                vocabularios=vocabularios_do_modelo(modelo))
    if dataset.dim != modelo.input_dim:
        raise DataMismatchError(f"Modelo espera D={modelo.input_dim}, características têm D={dataset.dim}")
    if modelo.metadata.get("period_stats") is not None:
        dataset.period_stats = tuple(modelo.metadata["period_stats"])

    relatorio = evaluate_epoch(modelo, dataset, args.split, include_label_map=args.label_map)

    Path(args.report).parent.mkdir(parents=True, exist_ok=True)
    relatorio.save(args.report)
    print(formatar_relatorio_metricas(relatorio, "Relatório de métricas"))
    print(f"✓ Relatório salvo em {args.report}")

    diretorio = Path(args.confusion_dir) if args.confusion_dir else Path(args.report).parent
    diretorio.mkdir(parents=True, exist_ok=True)
    for tarefa, cm in relatorio.confusion_matrices.items():
        destino = diretorio / FORMATO_CSV_CONFUSAO.format(tarefa=tarefa)
        cm.to_csv(destino)
        print(f"✓ Matriz de confusão de '{tarefa}' salva em {destino}")

    if args.excel:
        exportar_relatorio_excel(relatorio, args.excel)
        print(f"✓ Planilha salva em {args.excel}")
    return CODIGO_SUCESSO


def construir_parser() -> argparse.ArgumentParser:
    parser = criar_parser(
        "Avalia um modelo multitarefa em uma partição",
        "  python avaliar_modelo.py --model m.omtl --features f.omft --meta m.jsonl --splits s.json "
        "--report relatorio.json\n"
        "  python avaliar_modelo.py --model m.omtl --features f.omft --meta m.jsonl --splits s.json "
        "--split val --report r.json --excel r.xlsx --label-map",
    )
    parser.add_argument("--model", required=True, help="Checkpoint OMTL")
    parser.add_argument("--features", required=True, help="Arquivo de características OMFT")
    parser.add_argument("--meta", required=True, help="Arquivo de metadados JSON Lines")
    parser.add_argument("--splits", required=True, help="Arquivo de divisão JSON")
    parser.add_argument("--split", choices=PARTICOES[:3], default="test", help="Partição avaliada (padrão: test)")
    parser.add_argument("--report", required=True, help="Relatório JSON de saída")
    parser.add_argument("--confusion-dir", help="Diretório dos CSVs de confusão (padrão: o do relatório)")
    parser.add_argument("--excel", help="Planilha Excel de saída (opcional)")
    parser.add_argument("--label-map", action="store_true", help="Inclui o MAP por rótulo nas tarefas multilabel")
    return parser


def main(argv: Optional[List[str]] = None):
    """Função principal do script."""
    sys.exit(rodar(construir_parser(), cmd_eval, argv))


if __name__ == "__main__":
    main()
