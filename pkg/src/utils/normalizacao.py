"""
Módulo de normalização de rótulos para o motor multitarefa.

Este módulo fornece funções para normalizar rótulos de metadados de museus
(artistas, tipos e materiais), identificar rótulos ambíguos que devem ser
excluídos e encontrar o rótulo mais parecido em um vocabulário, facilitando a
correspondência entre variações de escrita do mesmo nome.
"""

import re
import unicodedata
from typing import Iterable, Optional

from Levenshtein import distance

from ..config import ROTULOS_EXCLUIDOS


def normalizar_rotulo(rotulo: str) -> str:
    """
    Normaliza espaços de um rótulo, preservando acentos e maiúsculas.

    Args:
        rotulo: Rótulo bruto vindo dos metadados

    Returns:
        Rótulo sem espaços nas pontas e com espaços internos simples

    Examples:
        >>> normalizar_rotulo("  Rembrandt   van Rijn ")
        'Rembrandt van Rijn'
        >>> normalizar_rotulo(None)
        ''
    """
    if not rotulo or not isinstance(rotulo, str):
        return ""
    return re.sub(r'\s+', ' ', rotulo.strip())


def chave_comparacao(rotulo: str) -> str:
    """
    Gera chave de comparação sem acentos e sem diferenciar maiúsculas.

    Examples:
        >>> chave_comparacao("  ANÓNYMOUS ")
        'anonymous'
    """
    texto = normalizar_rotulo(rotulo)
    texto = unicodedata.normalize('NFD', texto)
    texto = ''.join(char for char in texto if unicodedata.category(char) != 'Mn')
    return texto.casefold()


def eh_rotulo_excluido(rotulo: str) -> bool:
    """
    Verifica se o rótulo é ambíguo ("unknown", "anonymous") ou vazio.

    Examples:
        >>> eh_rotulo_excluido("Unknown")
        True
        >>> eh_rotulo_excluido("Jan Luyken")
        False
    """
    chave = chave_comparacao(rotulo)
    return not chave or chave in ROTULOS_EXCLUIDOS


def encontrar_rotulo_similar(rotulo: str, rotulos_validos: Iterable[str],
                             limite_distancia: int = 3) -> Optional[str]:
    """
    Encontra rótulo similar usando distância de Levenshtein.

    Args:
        rotulo: Rótulo procurado
        rotulos_validos: Rótulos do vocabulário
        limite_distancia: Distância máxima permitida (padrão: 3)

    Returns:
        Rótulo mais parecido ou None se nenhum for suficientemente próximo

    Examples:
        >>> encontrar_rotulo_similar("Rembrant", ["Rembrandt", "Vermeer"])
        'Rembrandt'
        >>> encontrar_rotulo_similar("XYZ", ["Rembrandt", "Vermeer"]) is None
        True
    """
    if not rotulo or not isinstance(rotulo, str) or not rotulos_validos:
        return None

    chave = chave_comparacao(rotulo)
    melhor = None
    menor_distancia = limite_distancia + 1

    for candidato in rotulos_validos:
        dist = distance(chave, chave_comparacao(candidato))
        if dist == 0:
            return candidato
        if dist < menor_distancia:
            menor_distancia = dist
            melhor = candidato

    return melhor
