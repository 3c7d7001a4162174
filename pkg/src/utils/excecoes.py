"""
Exceções do motor multitarefa.

Todas derivam de ValueError (ou ArithmeticError, para falhas numéricas), de modo
que chamadores antigos que capturam ValueError continuam funcionando.
"""

from typing import Optional


class InvalidArgumentError(ValueError):
    """Argumento fora do domínio da operação (dimensão, intervalo, contagem)."""


class FormatError(ValueError):
    """
    Arquivo com formato inválido.

    Args:
        mensagem: Descrição do problema
        offset: Posição em bytes (arquivos binários) onde o problema foi detectado
        linha: Número da linha (arquivos texto)
    """

    def __init__(self, mensagem: str, offset: Optional[int] = None, linha: Optional[int] = None):
        self.offset = offset
        self.linha = linha
        if offset is not None:
            mensagem = f"{mensagem} (byte {offset})"
        elif linha is not None:
            mensagem = f"{mensagem} (linha {linha})"
        super().__init__(mensagem)


class DataMismatchError(ValueError):
    """Arquivos de entrada inconsistentes entre si (ex.: características x metadados)."""


class EmptyVocabularyError(ValueError):
    """Nenhum rótulo sobreviveu aos filtros do vocabulário."""


class StratificationError(ValueError):
    """Classe com amostras insuficientes para a divisão estratificada."""

    def __init__(self, classe: str, quantidade: int, minimo: int):
        self.classe = classe
        self.quantidade = quantidade
        super().__init__(
            f"Classe '{classe}' tem {quantidade} amostra(s); mínimo para estratificação é {minimo}"
        )


class UndefinedMetricError(ValueError):
    """Métrica sem nenhuma amostra avaliável."""


class UndefinedProbabilityError(ValueError):
    """Probabilidade condicional com contagem de condicionamento nula."""


class NumericalError(ArithmeticError):
    """Parâmetros deixaram de ser finitos após uma atualização."""
