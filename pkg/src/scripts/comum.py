"""
Utilidades compartilhadas pelos scripts de linha de comando.

Define o parser de argumentos com o código de saída de uso (1) e a execução de
comandos com o mapeamento de exceções para os códigos de saída:
0 sucesso, 1 erro de uso, 2 erro de dados/formato, 3 erro de execução.
"""

import argparse
import json
import sys
from typing import Callable, List, Optional

from src.config import CODIGO_ERRO_DADOS, CODIGO_ERRO_EXECUCAO, CODIGO_ERRO_USO, CODIGO_SUCESSO
from src.utils.excecoes import (
    DataMismatchError,
    EmptyVocabularyError,
    FormatError,
    InvalidArgumentError,
    StratificationError,
    UndefinedProbabilityError,
)

ERROS_DADOS = (
    FormatError,
    DataMismatchError,
    EmptyVocabularyError,
    StratificationError,
    UndefinedProbabilityError,
    FileNotFoundError,
    json.JSONDecodeError,
)


class ParserComandos(argparse.ArgumentParser):
    """ArgumentParser que encerra com código 1 em erros de uso."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(CODIGO_ERRO_USO, f"Erro: {message}\n")


def criar_parser(descricao: str, exemplos: str) -> ParserComandos:
    return ParserComandos(
        description=descricao,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=f"\nExemplos de uso:\n{exemplos}",
    )


def executar_comando(comando: Callable[[argparse.Namespace], int], args: argparse.Namespace) -> int:
    """
    Executa o comando e converte exceções em códigos de saída.

    Returns:
        Código de saída do comando ou do erro capturado
    """
    try:
        return comando(args)
    except InvalidArgumentError as e:
        print(f"Erro: {e}", file=sys.stderr)
        return CODIGO_ERRO_USO
    except ERROS_DADOS as e:
        print(f"Erro de dados: {e}", file=sys.stderr)
        return CODIGO_ERRO_DADOS
    except Exception as e:
        print(f"Erro inesperado: {e}", file=sys.stderr)
        return CODIGO_ERRO_EXECUCAO


def rodar(parser: argparse.ArgumentParser, comando: Callable[[argparse.Namespace], int],
          argv: Optional[List[str]] = None) -> int:
    """Interpreta argv e executa o comando (usado pelos main() dos scripts)."""
    args = parser.parse_args(argv)
    codigo = executar_comando(comando, args)
    if codigo == CODIGO_SUCESSO:
        print("\n✅ Comando executado com sucesso!")
    return codigo
