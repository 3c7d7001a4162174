"""
Módulo de validação de dados para o motor multitarefa

Este módulo contém funções para validar estruturas de dados JSON (registros de
metadados, arquivos de divisão, relatórios de métricas), campos obrigatórios,
períodos e listas de tarefas.
"""

import math
from typing import Any, Dict, List, Sequence, Tuple

from ..config import PARTICOES, TAREFAS, TOLERANCIA_SOMA_PROPORCOES
from .parser import extrair_periodo


def validar_registro_metadados(registro: Dict[str, Any], numero_linha: int) -> Tuple[bool, List[str]]:
    """
    Valida um registro do arquivo JSON Lines de metadados.

    Campos: id (obrigatório), artist, types[], materials[], period (número,
    [a, b] ou texto). Campos ausentes significam "sem rótulo para a tarefa".

    Args:
        registro: Objeto lido da linha
        numero_linha: Linha do arquivo, para mensagens de erro

    Returns:
        Tupla (sucesso, lista_de_erros)
    """
    erros = []

    if not isinstance(registro, dict):
        return False, [f"Linha {numero_linha}: registro deve ser um objeto JSON"]

    if "id" not in registro:
        erros.append(f"Linha {numero_linha}: campo obrigatório 'id' ausente")
    elif not isinstance(registro["id"], str) or not registro["id"].strip():
        erros.append(f"Linha {numero_linha}: campo 'id' deve ser uma string não vazia")

    artista = registro.get("artist")
    if artista is not None and not isinstance(artista, str):
        erros.append(f"Linha {numero_linha}: campo 'artist' deve ser uma string")

    for campo in ("types", "materials"):
        valor = registro.get(campo)
        if valor is None:
            continue
        if not isinstance(valor, list):
            erros.append(f"Linha {numero_linha}: campo '{campo}' deve ser uma lista")
        elif not all(isinstance(item, str) for item in valor):
            erros.append(f"Linha {numero_linha}: campo '{campo}' deve conter apenas strings")

    if "period" in registro and registro["period"] is not None:
        valido, erro = validar_periodo(registro["period"])
        if not valido:
            erros.append(f"Linha {numero_linha}: campo 'period' inválido: {erro}")

    return len(erros) == 0, erros


def validar_periodo(periodo: Any) -> Tuple[bool, str]:
    """
    Valida o formato de um período: ano, [a, b] com a ≤ b, ou texto reconhecível
    ("1600-1650", "c. 1635", data ISO).

    Returns:
        Tupla (sucesso, mensagem_de_erro)
    """
    if isinstance(periodo, bool):
        return False, "valor booleano não é um ano"
    if isinstance(periodo, (int, float)):
        if not math.isfinite(periodo):
            return False, "ano deve ser finito"
        return True, ""
    if isinstance(periodo, list):
        if len(periodo) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                        for v in periodo):
            return False, "intervalo deve ser [início, fim] numérico"
        if not all(math.isfinite(v) for v in periodo):
            return False, "extremos do intervalo devem ser finitos"
        if periodo[0] > periodo[1]:
            return False, f"início {periodo[0]} maior que fim {periodo[1]}"
        return True, ""
    if isinstance(periodo, str):
        extraido = extrair_periodo(periodo)
        if extraido is None:
            return False, f"texto não reconhecido como ano ou intervalo: '{periodo}'"
        if isinstance(extraido, tuple) and extraido[0] > extraido[1]:
            return False, f"início {extraido[0]:g} maior que fim {extraido[1]:g}"
        return True, ""
    return False, f"tipo não suportado: {type(periodo).__name__}"


def validar_estrutura_split(dados: Dict[str, Any]) -> Tuple[bool, List[str]]:
    """
    Valida estrutura do arquivo de divisão {seed, ratios, assignments}.

    Returns:
        Tupla (sucesso, lista_de_erros)
    """
    erros = []

    for campo in ("seed", "ratios", "assignments"):
        if campo not in dados:
            erros.append(f"Campo obrigatório '{campo}' ausente no arquivo de divisão")

    if "seed" in dados and not isinstance(dados["seed"], int):
        erros.append("Campo 'seed' deve ser um número inteiro")

    if "ratios" in dados:
        valido, erro = validar_proporcoes(dados["ratios"])
        if not valido:
            erros.append(f"Campo 'ratios' inválido: {erro}")

    if "assignments" in dados:
        if not isinstance(dados["assignments"], dict):
            erros.append("Campo 'assignments' deve ser um objeto")
        else:
            for id_amostra, particao in dados["assignments"].items():
                if particao not in PARTICOES:
                    erros.append(f"Amostra '{id_amostra}' com partição inválida '{particao}'")

    return len(erros) == 0, erros


def validar_proporcoes(proporcoes: Sequence[float]) -> Tuple[bool, str]:
    """
    Valida proporções de treino/validação/teste: três valores positivos somando 1.

    Examples:
        >>> validar_proporcoes([0.7, 0.2, 0.1])
        (True, '')
        >>> validar_proporcoes([0.7, 0.1, 0.1])[0]
        False
    """
    if not isinstance(proporcoes, (list, tuple)) or len(proporcoes) != 3:
        return False, "devem ser exatamente três valores"
    if not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in proporcoes):
        return False, "devem ser numéricas"
    if any(p <= 0 for p in proporcoes):
        return False, "devem ser positivas"
    if abs(sum(proporcoes) - 1.0) > TOLERANCIA_SOMA_PROPORCOES:
        return False, f"somam {sum(proporcoes):.6g}, esperado 1"
    return True, ""


def validar_lista_tarefas(tarefas: Sequence[str]) -> Tuple[bool, List[str]]:
    """
    Valida nomes de tarefas contra o catálogo (artist, type, material, period).

    Returns:
        Tupla (sucesso, lista_de_erros)
    """
    erros = []
    if not tarefas:
        erros.append("Nenhuma tarefa informada")
    for tarefa in tarefas:
        if tarefa not in TAREFAS:
            erros.append(f"Tarefa desconhecida '{tarefa}'; opções: {', '.join(TAREFAS)}")
    if len(set(tarefas)) != len(tarefas):
        erros.append("Tarefas repetidas na lista")
    return len(erros) == 0, erros


def validar_estrutura_relatorio(dados: Dict[str, Any]) -> Tuple[bool, List[str]]:
    """
    Valida estrutura de um relatório de métricas serializado.

    Returns:
        Tupla (sucesso, lista_de_erros)
    """
    erros = []

    for campo in ("split", "n_samples", "tasks", "confusion_matrices"):
        if campo not in dados:
            erros.append(f"Campo obrigatório '{campo}' ausente no relatório")

    for tarefa, metricas in dados.get("tasks", {}).items():
        if tarefa not in TAREFAS:
            erros.append(f"Tarefa desconhecida no relatório: '{tarefa}'")
            continue
        for nome, valor in metricas.items():
            if valor is None:
                continue
            if not isinstance(valor, (int, float)):
                erros.append(f"Métrica '{tarefa}.{nome}' deve ser numérica")
            elif nome != "mae_years" and not 0 <= valor <= 1:
                erros.append(f"Métrica '{tarefa}.{nome}' fora de [0, 1]: {valor}")
            elif valor < 0:
                erros.append(f"Métrica '{tarefa}.{nome}' negativa: {valor}")

    return len(erros) == 0, erros
