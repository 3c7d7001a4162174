"""
Configuração básica do motor de aprendizado multitarefa para metadados de obras de arte
"""

# Formato binário das matrizes de características (OMFT)
MAGIC_CARACTERISTICAS = b"OMFT"
VERSAO_CARACTERISTICAS = 1
TAMANHO_CABECALHO_CARACTERISTICAS = 24  # magic (4) + versão u32 (4) + N u64 (8) + D u64 (8)

# Formato binário dos checkpoints de modelo (OMTL)
MAGIC_CHECKPOINT = b"OMTL"
VERSAO_CHECKPOINT = 1

# Catálogo de tarefas: nome -> (tipo, campo no registro de metadados)
TIPOS_TAREFA = ("multiclass", "multilabel", "regression")
TAREFAS = {
    "artist": ("multiclass", "artist"),
    "type": ("multilabel", "types"),
    "material": ("multilabel", "materials"),
    "period": ("regression", "period"),
}
ORDEM_TAREFAS = ["artist", "type", "material", "period"]
TAREFA_ANCORA_PADRAO = "artist"

# Rótulos ambíguos que nunca recebem id (comparação sem diferenciar maiúsculas)
ROTULOS_EXCLUIDOS = ("unknown", "anonymous")

# Stemming de materiais: sufixos em ordem de prioridade
SUFIXOS_STEMMING = ("ings", "ing", "es", "s")
TAMANHO_MINIMO_RADICAL = 3

# Divisão estratificada
PROPORCOES_SPLIT_PADRAO = (0.7, 0.2, 0.1)
MIN_AMOSTRAS_POR_CLASSE_SPLIT = 3
TOLERANCIA_SOMA_PROPORCOES = 1e-9
PARTICOES = ("train", "val", "test", "excluded")

# Padrões de treinamento (escala de bancada)
BATCH_PADRAO = 32
EPOCAS_PADRAO = 30
TAXA_APRENDIZADO_PADRAO = 0.01
MOMENTUM_PADRAO = 0.9
OCULTA_PADRAO = 64
OCULTA_MAXIMA = 8192
SEMENTE_PADRAO = 42
MIN_AMOSTRAS_ROTULO = 1
ESCALA_REGRESSAO_PADRAO = 0.1
MODOS_CALIBRACAO = ("off", "after-warmup")
POLITICAS_CALIBRACAO = ("ratio", "scale-only")

# Verificação de gradiente
EPSILON_GRAD_CHECK = 1e-5
PISO_ERRO_RELATIVO = 1e-12

# Métricas
TOLERANCIA_PERIODO_ANOS = 50.0
TOP_K_PADRAO = (1, 3)

# Análise de co-ocorrência
LARGURA_BIN_PERIODO = 25

# Benchmark multitarefa x tarefa única
BENCH_DIM_CARACTERISTICAS = 2048
BENCH_OCULTA = 512
BENCH_DIMS_TAREFAS = [100, 50, 50, 1]
BENCH_LOTES = 200
BENCH_TAMANHO_LOTE = 32
BENCH_PASSES_AQUECIMENTO = 3
MODOS_BENCHMARK = ("eval", "train")

# Gerador sintético
SINTETICO_ANO_INICIAL = 1200
SINTETICO_RUIDO_PERIODO = 10.0
SINTETICO_RUIDO_CARACTERISTICAS = 1.0
SINTETICO_TIPOS = 8
SINTETICO_MATERIAIS_POR_OBRA = 2
SINTETICO_FRACAO_INTERVALOS = 0.2
SINTETICO_MEIA_LARGURA_INTERVALO = 10

# Formatos de período aceitos em texto livre
PADROES_PERIODO = [
    r'^\s*(-?\d{3,4})\s*[-–/]\s*(-?\d{3,4})\s*$',          # "1600-1650"
    r'^\s*(?:c\.|ca\.|circa|cerca de)\s*(-?\d{1,4})\s*$',  # "c. 1635"
    r'^\s*(-?\d{1,4})\s*$',                               # "1635"
]

# Códigos de saída dos scripts
CODIGO_SUCESSO = 0
CODIGO_ERRO_USO = 1
CODIGO_ERRO_DADOS = 2
CODIGO_ERRO_EXECUCAO = 3

# Arquivos gerados
FORMATO_CSV_CONFUSAO = "confusao_{tarefa}.csv"
