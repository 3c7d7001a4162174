#!/usr/bin/env python3
"""
Script de análise de entrelaçamento e confusões.

Consulta probabilidades condicionais P(T1 | T2, T3) estimadas dos metadados,
mede a dependência entre o artista e as demais tarefas, lista os pares de
confusão mais frequentes de uma matriz salva em CSV e exporta as ativações da
camada compartilhada como características.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# Adicionar a raiz do repositório ao path para imports
sys.path.append(str(Path(__file__).parent.parent.parent))

from src.config import CODIGO_SUCESSO, LARGURA_BIN_PERIODO, PARTICOES
from src.scripts.avaliar_modelo import vocabularios_do_modelo
from src.scripts.comum import criar_parser, rodar
from src.scripts.treinar_modelo import carregar_conjunto
from src.utils.analysis import (
    build_cooccurrence_table,
    conditional_entropy,
    converter_valor,
    export_shared_features,
    mutual_information,
    query_conditional,
    suggest_label,
    top_confusions,
)
from src.utils.data import read_metadata
from src.utils.excecoes import InvalidArgumentError
from src.utils.metrics import ConfusionMatrix
from src.utils.model import load_checkpoint
from src.utils.parser import parsear_consulta, parsear_filtros
from src.utils.relatorio import formatar_confusoes

MAXIMO_LINHAS_EXIBIDAS = 20


def consultar(registros: List[Dict[str, Any]], consulta: str, where: Optional[str],
              largura: int) -> Dict[str, Any]:
    """Executa a consulta condicional e devolve o resultado serializável."""
    campos = parsear_consulta(consulta)
    tabela = build_cooccurrence_table(registros, campos, largura)

    valores: List[Any] = [None, None, None]
    filtros = parsear_filtros(where) if where else {}
    for campo, texto in filtros.items():
        if campo not in campos:
            raise InvalidArgumentError(f"Filtro '{campo}' não faz parte da consulta {consulta}")
        posicao = campos.index(campo)
        valor = converter_valor(campo, texto, largura)
        conhecidos = tabela.values(posicao)
        if valor not in conhecidos:
            sugestao = suggest_label(str(valor), conhecidos)
            dica = f"; você quis dizer '{sugestao}'?" if sugestao else ""
            print(f"Aviso: valor '{texto}' não encontrado para '{campo}'{dica}", file=sys.stderr)
        valores[posicao] = valor

    linhas = query_conditional(tabela, *valores)
    print(f"P({campos[0]} | {campos[1]}, {campos[2]}) - {len(linhas)} linha(s), faixas de {largura} anos")
    for linha in linhas[:MAXIMO_LINHAS_EXIBIDAS]:
        print(f"  P({linha['t1']} | {linha['t2']}, {linha['t3']}) = {linha['probability']:.3f} "
              f"({linha['count']}/{linha['support']})")
    if len(linhas) > MAXIMO_LINHAS_EXIBIDAS:
        print(f"  ... mais {len(linhas) - MAXIMO_LINHAS_EXIBIDAS} linha(s)")
    return {"fields": list(campos), "where": filtros, "bin_width": largura, "rows": linhas}


def dependencias(registros: List[Dict[str, Any]], largura: int) -> Dict[str, Dict[str, float]]:
    """Informação mútua e entropia condicional entre o artista e as demais tarefas."""
    resultado = {}
    print("Dependência em relação ao artista (nats):")
    for campo in ("type", "material", "period"):
        info = mutual_information(registros, "artist", campo, largura)
        entropia = conditional_entropy(registros, campo, "artist", largura)
        resultado[campo] = {"mutual_information": info, "conditional_entropy": entropia}
        print(f"  {campo:<9} I={info:.3f}  H(·|artist)={entropia:.3f}")
    return resultado


def cmd_analyze(args: argparse.Namespace) -> int:
    """Executa as análises pedidas."""
    if not (args.meta or args.confusion or args.export_features):
        raise InvalidArgumentError("Informe --meta, --confusion ou --export-features")
    resultado: Dict[str, Any] = {}

    if args.meta and not args.export_features:
        registros = read_metadata(args.meta)
        resultado["query"] = consultar(registros, args.query, args.where, args.bin_width)
        if args.dependencies:
            resultado["dependencies"] = dependencias(registros, args.bin_width)

    if args.confusion:
        cm = ConfusionMatrix.from_csv(args.confusion)
        if args.labels_from_model:
            vocabulario = vocabularios_do_modelo(load_checkpoint(args.labels_from_model)).get("artist")
            if vocabulario is not None and len(vocabulario) == len(cm.labels):
                cm = ConfusionMatrix(cm.counts, list(vocabulario.labels))
            else:
                print("Aviso: vocabulário do modelo não corresponde à matriz; rótulos do CSV mantidos",
                      file=sys.stderr)
        pares = top_confusions(cm, args.top_confusions)
        print("Confusões mais frequentes:")
        print(formatar_confusoes(pares, cm.labels))
        resultado["top_confusions"] = [
            {"true": cm.labels[t], "predicted": cm.labels[p], "count": c, "symmetric_count": s}
            for t, p, c, s in pares
        ]

    if args.export_features:
        if not (args.model and args.features and args.meta and args.splits):
            raise InvalidArgumentError("--export-features exige --model, --features, --meta e --splits")
        modelo = load_checkpoint(args.model)
        dataset = carregar_conjunto(args.features, args.meta, args.splits,
                                    vocabularios=vocabularios_do_modelo(modelo))
        ativacoes = export_shared_features(modelo, dataset, args.split, args.export_features)
        print(f"✓ Características compartilhadas salvas em {args.export_features} "
              f"({ativacoes.shape[0]} × {ativacoes.shape[1]})")
        resultado["export"] = {"path": args.export_features, "rows": int(ativacoes.shape[0]),
                               "dim": int(ativacoes.shape[1])}

    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, 'w', encoding='utf-8') as f:
            json.dump(resultado, f, indent=2, ensure_ascii=False)
            f.write("\n")
        print(f"✓ Análise salva em {args.out}")
    return CODIGO_SUCESSO


def construir_parser() -> argparse.ArgumentParser:
    parser = criar_parser(
        "Analisa o entrelaçamento entre tarefas e as confusões de um modelo",
        "  python analisar_dados.py --meta m.jsonl --query 'artist|period,material' --where period=1625\n"
        "  python analisar_dados.py --confusion confusao_artist.csv --top-confusions 5\n"
        "  python analisar_dados.py --model m.omtl --features f.omft --meta m.jsonl --splits s.json "
        "--export-features compartilhadas.omft",
    )
    parser.add_argument("--meta", help="Arquivo de metadados JSON Lines")
    parser.add_argument("--query", default="artist|period,material", help="Consulta no formato 'T1|T2,T3'")
    parser.add_argument("--where", help="Filtros campo=valor separados por vírgula")
    parser.add_argument("--bin-width", type=int, default=LARGURA_BIN_PERIODO,
                        help="Largura das faixas de período em anos (padrão: 25)")
    parser.add_argument("--dependencies", action="store_true",
                        help="Mostra informação mútua e entropia condicional em relação ao artista")
    parser.add_argument("--confusion", help="CSV de matriz de confusão")
    parser.add_argument("--top-confusions", type=int, default=10, help="Número de pares listados (padrão: 10)")
    parser.add_argument("--labels-from-model", help="Checkpoint cujo vocabulário de artistas rotula a matriz")
    parser.add_argument("--export-features", help="Arquivo OMFT para as ativações compartilhadas")
    parser.add_argument("--model", help="Checkpoint OMTL (para --export-features)")
    parser.add_argument("--features", help="Arquivo de características OMFT (para --export-features)")
    parser.add_argument("--splits", help="Arquivo de divisão JSON (para --export-features)")
    parser.add_argument("--split", choices=PARTICOES[:3], default="test", help="Partição exportada")
    parser.add_argument("--out", help="Arquivo JSON de saída (opcional)")
    return parser


def main(argv: Optional[List[str]] = None):
    """Função principal do script."""
    sys.exit(rodar(construir_parser(), cmd_analyze, argv))


if __name__ == "__main__":
    main()
