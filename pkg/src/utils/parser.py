"""
Módulo de parsing de texto para o motor multitarefa.

Este módulo extrai informações estruturadas de texto livre: datas de criação
escritas de várias formas nos metadados de museus ("1600-1650", "c. 1635",
"1635-05-01") e as listas passadas nas linhas de comando dos scripts.
"""

import re
from typing import List, Optional, Tuple, Union

from dateutil import parser as parser_datas

from ..config import PADROES_PERIODO
from .excecoes import InvalidArgumentError

Periodo = Union[float, Tuple[float, float]]


def extrair_periodo(texto: str) -> Optional[Periodo]:
    """
    Identifica ano exato ou intervalo de anos em texto livre.

    Args:
        texto: Texto do campo de período

    Returns:
        Ano (float), intervalo (a, b) ou None se nada for reconhecido

    Examples:
        >>> extrair_periodo("1600-1650")
        (1600.0, 1650.0)
        >>> extrair_periodo("c. 1635")
        1635.0
        >>> extrair_periodo("1635-05-01")
        1635.0
        >>> extrair_periodo("sem data") is None
        True
    """
    if not texto or not isinstance(texto, str):
        return None

    for padrao in PADROES_PERIODO:
        match = re.match(padrao, texto, re.IGNORECASE)
        if match:
            grupos = [float(g) for g in match.groups()]
            if len(grupos) == 2:
                return grupos[0], grupos[1]
            return grupos[0]

    # Datas completas (ISO ou por extenso) viram o ano correspondente
    try:
        data = parser_datas.parse(texto, fuzzy=False)
        return float(data.year)
    except (ValueError, OverflowError):
        return None


def parsear_lista_inteiros(texto: str) -> List[int]:
    """
    Converte "100,50,50,1" em [100, 50, 50, 1].

    Raises:
        InvalidArgumentError: Se algum item não for inteiro
    """
    itens = [item.strip() for item in (texto or "").split(",") if item.strip()]
    if not itens:
        raise InvalidArgumentError("Lista de inteiros vazia")
    try:
        return [int(item) for item in itens]
    except ValueError:
        raise InvalidArgumentError(f"Lista de inteiros inválida: '{texto}'")


def parsear_proporcoes(texto: str) -> Tuple[float, float, float]:
    """
    Converte "0.7,0.2,0.1" nas proporções de treino, validação e teste.

    Raises:
        InvalidArgumentError: Se não houver exatamente três números
    """
    itens = [item.strip() for item in (texto or "").split(",") if item.strip()]
    if len(itens) != 3:
        raise InvalidArgumentError(f"Esperadas 3 proporções (treino,validação,teste), recebido '{texto}'")
    try:
        return tuple(float(item) for item in itens)
    except ValueError:
        raise InvalidArgumentError(f"Proporções inválidas: '{texto}'")


def parsear_consulta(texto: str) -> Tuple[str, str, str]:
    """
    Converte a consulta "artist|period,material" em (T1, T2, T3).

    Examples:
        >>> parsear_consulta("artist|period,material")
        ('artist', 'period', 'material')
    """
    match = re.match(r'^\s*(\w+)\s*\|\s*(\w+)\s*,\s*(\w+)\s*$', texto or "")
    if not match:
        raise InvalidArgumentError(f"Consulta inválida '{texto}'; use o formato 'T1|T2,T3'")
    return match.group(1), match.group(2), match.group(3)


def parsear_filtros(texto: str) -> dict:
    """
    Converte "period=1625,material=oil" em {"period": "1625", "material": "oil"}.
    """
    filtros = {}
    for item in (texto or "").split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise InvalidArgumentError(f"Filtro inválido '{item}'; use campo=valor")
        campo, valor = item.split("=", 1)
        filtros[campo.strip()] = valor.strip()
    return filtros
