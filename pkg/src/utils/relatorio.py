"""
Módulo de geração de relatórios do motor multitarefa.

Este módulo contém funções para formatar as linhas de progresso do treinamento,
os relatórios de métricas e de benchmark em texto, e para exportar relatórios e
matrizes de confusão em planilhas Excel.
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .metrics import MetricsReport


def gerar_cabecalho_relatorio(titulo: str, detalhe: Optional[str] = None) -> str:
    """
    Gera cabeçalho formatado para relatórios em texto.

    Args:
        titulo: Título do relatório
        detalhe: Linha adicional (opcional), por exemplo a partição avaliada

    Returns:
        String formatada com cabeçalho do relatório
    """
    data_atual = datetime.now().strftime("%d/%m/%Y às %H:%M")

    linhas = []
    linhas.append("=" * 80)
    linhas.append(titulo.upper())
    linhas.append("=" * 80)

    if detalhe:
        linhas.append(detalhe)

    linhas.append(f"Gerado em: {data_atual}")
    linhas.append("=" * 80)
    linhas.append("")

    return "\n".join(linhas)


def formatar_linha_epoca(epoca: int, nomes: Sequence[str], perdas_brutas: Sequence[float],
                         total: float, segundos: float,
                         total_validacao: Optional[float] = None) -> str:
    """
    Formata a linha de progresso de uma época.

    Examples:
        >>> formatar_linha_epoca(3, ["artist", "period"], [1.5, 0.25], 1.525, 0.5)
        'Época 003 | artist=1.5000 period=0.2500 | total=1.5250 | 0.50s'
    """
    perdas = " ".join(f"{nome}={perda:.4f}" for nome, perda in zip(nomes, perdas_brutas))
    linha = f"Época {epoca:03d} | {perdas} | total={total:.4f}"
    if total_validacao is not None:
        linha += f" val={total_validacao:.4f}"
    return f"{linha} | {segundos:.2f}s"


def _formatar_valor(nome: str, valor: Optional[float]) -> str:
    if valor is None:
        return "indefinida"
    if nome == "mae_years":
        return f"{valor:.1f} anos"
    return f"{100 * valor:.1f}%"


def formatar_relatorio_metricas(relatorio: MetricsReport, titulo: Optional[str] = None) -> str:
    """
    Gera o relatório de métricas em texto, uma seção por tarefa.

    Args:
        relatorio: Métricas calculadas
        titulo: Título para o cabeçalho (opcional)

    Returns:
        String com o relatório formatado
    """
    linhas = []

    if titulo:
        linhas.append(gerar_cabecalho_relatorio(titulo, f"Partição: {relatorio.split}"))

    linhas.append(f"Amostras avaliadas: {relatorio.n_samples}")
    linhas.append("")

    for tarefa, metricas in relatorio.tasks.items():
        linhas.append(f"[{tarefa}]")
        for nome, valor in metricas.items():
            linhas.append(f"  {nome:<20} {_formatar_valor(nome, valor)}")
        if tarefa in relatorio.confusion_matrices:
            cm = relatorio.confusion_matrices[tarefa]
            linhas.append(f"  {'confusão':<20} {cm.total - cm.trace()} de {cm.total} fora da diagonal")
        linhas.append("")

    return "\n".join(linhas)


def formatar_relatorio_benchmark(dados: Dict[str, Any]) -> str:
    """
    Resume o benchmark multitarefa x tarefa única.

    Args:
        dados: Dicionário produzido por BenchmarkReport.to_dict()
    """
    linhas = [
        f"BENCHMARK ({dados['mode']}) - {dados['n_batches']} lotes de {dados['batch_size']}",
        "=" * 50,
        f"D={dados['input_dim']}  H={dados['hidden_dim']}  K={dados['output_dims']}",
        f"Multitarefa:            {dados['multi_seconds']:.3f}s",
    ]
    for nome, segundos in zip(dados['task_names'], dados['single_seconds']):
        linhas.append(f"  tarefa única {nome:<10} {segundos:.3f}s")
    linhas.extend([
        f"Soma das tarefas únicas: {sum(dados['single_seconds']):.3f}s",
        f"Razão medida:            {dados['measured_ratio']:.2f}x",
        f"Razão analítica (FLOPs): {dados['flop_ratio']:.2f}x",
        "",
    ])
    return "\n".join(linhas)


def formatar_confusoes(pares: Sequence[Tuple[int, int, int, int]], rotulos: Sequence[str]) -> str:
    """
    Formata os pares de confusão mais frequentes.

    Returns:
        Uma linha por par: verdadeiro → previsto (contagem, contagem simétrica)
    """
    if not pares:
        return "Nenhuma confusão fora da diagonal."

    linhas = []
    for posicao, (verdadeiro, previsto, contagem, simetrica) in enumerate(pares, 1):
        linhas.append(f"{posicao:2d}. {rotulos[verdadeiro]} → {rotulos[previsto]}: "
                      f"{contagem} (inverso: {simetrica})")
    return "\n".join(linhas)


def exportar_relatorio_excel(relatorio: MetricsReport, caminho: Union[str, Path]) -> None:
    """
    Exporta métricas e matrizes de confusão para uma planilha Excel.

    A primeira aba lista tarefa, métrica e valor; cada tarefa multiclass ganha uma
    aba com sua matriz de confusão.

    Raises:
        ImportError: Se openpyxl não estiver instalado
    """
    try:
        from openpyxl import Workbook
    except ImportError:
        raise ImportError("Biblioteca openpyxl não encontrada. Instale com: pip install openpyxl")

    workbook = Workbook()
    sheet = workbook.active
    sheet.title = "Métricas"
    sheet.append(["Partição", relatorio.split])
    sheet.append(["Amostras", relatorio.n_samples])
    sheet.append([])
    sheet.append(["Tarefa", "Métrica", "Valor"])
    for tarefa, metricas in relatorio.tasks.items():
        for nome, valor in metricas.items():
            sheet.append([tarefa, nome, valor])

    for tarefa, cm in relatorio.confusion_matrices.items():
        aba = workbook.create_sheet(title=f"Confusão {tarefa}"[:31])
        aba.append([""] + list(cm.labels))
        for rotulo, linha in zip(cm.labels, cm.counts.tolist()):
            aba.append([rotulo] + linha)

    workbook.save(str(caminho))

