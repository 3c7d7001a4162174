"""
Testes unitários e de propriedade para o motor multitarefa
"""
