"""
Motor de Aprendizado Multitarefa para Metadados de Obras de Arte
"""

__version__ = "0.1.0"
__author__ = "Motor de Aprendizado Multitarefa"
__description__ = "Treinamento de representação compartilhada e cabeças por tarefa sobre vetores de características"
