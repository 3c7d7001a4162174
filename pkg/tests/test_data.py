"""
Testes unitários para o módulo de dados (arquivos OMFT, metadados, vocabulários,
stemming, períodos, divisão estratificada e gerador sintético).
"""

import json
import shutil
import struct
import tempfile
from pathlib import Path

import numpy as np
import pytest

from src.utils.data import (
    SplitAssignment,
    anchor_ids,
    apply_split,
    build_dataset,
    build_label_vocab,
    build_vocabularies,
    cohort_sizes,
    fit_period_stats,
    generate_synthetic,
    load_feature_matrix,
    read_metadata,
    resolve_period,
    split_counts,
    stem_material_label,
    stem_material_token,
    stratified_split,
    stratify_labels,
    write_feature_matrix,
    write_metadata,
)
from src.utils.excecoes import (
    DataMismatchError,
    EmptyVocabularyError,
    FormatError,
    InvalidArgumentError,
    StratificationError,
)


def registros_exemplo():
    return [
        {"id": "a1", "artist": "Rembrandt", "types": ["print"], "materials": ["Papers", "ink"], "period": 1635},
        {"id": "a2", "artist": "Rembrandt", "types": ["print", "drawing"], "materials": ["paper"],
         "period": [1640, 1650]},
        {"id": "a3", "artist": "Vermeer", "types": ["painting"], "materials": ["oil", "canvas"],
         "period": "c. 1660"},
        {"id": "a4", "artist": "anonymous", "types": ["print"], "materials": ["paper"], "period": 1700},
        {"id": "a5", "artist": "Vermeer", "types": ["painting"]},
    ]


class TestArquivoCaracteristicas:
    """Testes para write_feature_matrix e load_feature_matrix."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()
        self.caminho = Path(self.temp_dir) / "feats.omft"

    def teardown_method(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_ida_e_volta(self):
        """Matriz gravada é lida de volta igual, em float32."""
        matriz = np.arange(12, dtype=np.float32).reshape(3, 4) / 7
        write_feature_matrix(self.caminho, matriz)
        lida = load_feature_matrix(self.caminho)
        assert lida.dtype == np.float32
        assert lida.tobytes() == matriz.tobytes()

    def test_cabecalho(self):
        """Cabeçalho com magic, versão, N e D little-endian."""
        write_feature_matrix(self.caminho, np.zeros((2, 5), dtype=np.float32))
        dados = self.caminho.read_bytes()
        assert dados[:4] == b"OMFT"
        assert struct.unpack_from("<IQQ", dados, 4) == (1, 2, 5)
        assert len(dados) == 24 + 4 * 10

    def test_magic_invalido(self):
        """Magic errado gera FormatError no byte 0."""
        write_feature_matrix(self.caminho, np.zeros((1, 2)))
        dados = bytearray(self.caminho.read_bytes())
        dados[:4] = b"NOPE"
        self.caminho.write_bytes(bytes(dados))
        with pytest.raises(FormatError) as erro:
            load_feature_matrix(self.caminho)
        assert erro.value.offset == 0

    def test_versao_invalida(self):
        """Versão diferente de 1 é rejeitada no byte 4."""
        self.caminho.write_bytes(b"OMFT" + struct.pack("<IQQ", 2, 1, 1) + bytes(4))
        with pytest.raises(FormatError) as erro:
            load_feature_matrix(self.caminho)
        assert erro.value.offset == 4

    def test_truncado(self):
        """Arquivo menor que 24 + 4·N·D bytes é rejeitado."""
        write_feature_matrix(self.caminho, np.ones((4, 4)))
        self.caminho.write_bytes(self.caminho.read_bytes()[:-4])
        with pytest.raises(FormatError):
            load_feature_matrix(self.caminho)

    def test_bytes_excedentes(self):
        """Bytes após a matriz são rejeitados."""
        write_feature_matrix(self.caminho, np.ones((2, 2)))
        self.caminho.write_bytes(self.caminho.read_bytes() + b"\x00")
        with pytest.raises(FormatError) as erro:
            load_feature_matrix(self.caminho)
        assert erro.value.offset == 24 + 16

    def test_nao_finito(self):
        """NaN na matriz é rejeitado com o offset do valor."""
        matriz = np.ones((2, 3), dtype=np.float32)
        matriz[1, 1] = np.nan
        write_feature_matrix(self.caminho, matriz)
        with pytest.raises(FormatError) as erro:
            load_feature_matrix(self.caminho)
        assert erro.value.offset == 24 + 4 * 4

    def test_n_zero(self):
        """N = 0 é rejeitado."""
        self.caminho.write_bytes(b"OMFT" + struct.pack("<IQQ", 1, 0, 3))
        with pytest.raises(FormatError):
            load_feature_matrix(self.caminho)

    def test_inexistente(self):
        """Arquivo ausente gera FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_feature_matrix(Path(self.temp_dir) / "nada.omft")


class TestMetadados:
    """Testes para read_metadata e write_metadata."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()
        self.caminho = Path(self.temp_dir) / "meta.jsonl"

    def teardown_method(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_ida_e_volta(self):
        """Registros gravados são lidos na mesma ordem."""
        write_metadata(self.caminho, registros_exemplo())
        assert read_metadata(self.caminho) == registros_exemplo()

    def test_linhas_em_branco_ignoradas(self):
        """Linhas vazias entre registros não contam."""
        self.caminho.write_text('{"id": "x"}\n\n{"id": "y"}\n', encoding='utf-8')
        assert [r["id"] for r in read_metadata(self.caminho)] == ["x", "y"]

    def test_json_invalido_com_linha(self):
        """JSON inválido indica o número da linha."""
        self.caminho.write_text('{"id": "x"}\n{"id": \n', encoding='utf-8')
        with pytest.raises(FormatError) as erro:
            read_metadata(self.caminho)
        assert erro.value.linha == 2

    def test_id_repetido(self):
        """Id repetido é rejeitado."""
        self.caminho.write_text('{"id": "x"}\n{"id": "x"}\n', encoding='utf-8')
        with pytest.raises(FormatError) as erro:
            read_metadata(self.caminho)
        assert erro.value.linha == 2

    def test_registro_sem_id(self):
        """Registro sem id é rejeitado."""
        self.caminho.write_text('{"artist": "X"}\n', encoding='utf-8')
        with pytest.raises(FormatError):
            read_metadata(self.caminho)

    def test_intervalo_invertido(self):
        """Período [b, a] com a < b é rejeitado na leitura."""
        self.caminho.write_text('{"id": "x", "period": [1650, 1600]}\n', encoding='utf-8')
        with pytest.raises(FormatError):
            read_metadata(self.caminho)

    @pytest.mark.parametrize("periodo", ["1650-1600", "sem data"])
    def test_periodo_textual_invalido(self, periodo):
        """Texto de período invertido ou irreconhecível é erro de formato com a linha."""
        self.caminho.write_text('{"id": "a", "period": 1635}\n'
                                f'{{"id": "b", "period": "{periodo}"}}\n', encoding='utf-8')
        with pytest.raises(FormatError) as erro:
            read_metadata(self.caminho)
        assert erro.value.linha == 2

    def test_vazio(self):
        """Arquivo sem registros é rejeitado."""
        self.caminho.write_text("\n", encoding='utf-8')
        with pytest.raises(FormatError):
            read_metadata(self.caminho)


class TestStemming:
    """Testes para stem_material_token e stem_material_label."""

    @pytest.mark.parametrize("token,esperado", [
        ("Papers", "paper"),
        ("paper", "paper"),
        ("etchings", "etch"),
        ("drawing", "draw"),
        ("oil", "oil"),
        ("glass", "glass"),
        ("inks", "ink"),
    ])
    def test_radicais(self, token, esperado):
        """Sufixos ings/ing/es/s são removidos, preservando radicais curtos e "ss"."""
        assert stem_material_token(token) == esperado

    def test_radical_minimo(self):
        """Sufixo não é removido se o radical ficar com menos de 3 caracteres."""
        assert stem_material_token("ups") == "ups"
        assert stem_material_token("ring") == "ring"

    def test_paper_e_papers_mesmo_id(self):
        """"Paper" e "papers" compartilham o mesmo id de material."""
        regs = [{"id": "1", "materials": ["Paper"]}, {"id": "2", "materials": ["papers"]}]
        vocabulario = build_label_vocab(regs, "material", 1)
        assert vocabulario.labels == ["paper"]
        assert vocabulario.counts == [2]

    def test_rotulo_com_varias_palavras(self):
        """Cada palavra do rótulo passa pelo stemming."""
        assert stem_material_label("  Oil   Paintings ") == "oil paint"

    def test_vazio(self):
        """Token vazio devolve texto vazio."""
        assert stem_material_token("") == ""


class TestVocabulario:
    """Testes para build_label_vocab e build_vocabularies."""

    def test_ordem_por_frequencia(self):
        """Ids seguem a frequência decrescente com desempate lexicográfico."""
        regs = [{"id": str(i), "artist": a} for i, a in enumerate(["B", "A", "C", "C", "B", "A", "C"])]
        vocabulario = build_label_vocab(regs, "artist", 1)
        assert vocabulario.labels == ["C", "A", "B"]
        assert vocabulario.id_of("A") == 1
        assert vocabulario.id_of("Z") is None

    def test_rotulos_ambiguos_excluidos(self):
        """"unknown" e "anonymous" nunca recebem id."""
        regs = [{"id": "1", "artist": "Unknown"}, {"id": "2", "artist": "anonymous"}, {"id": "3", "artist": "X"}]
        assert build_label_vocab(regs, "artist", 1).labels == ["X"]

    def test_min_samples(self):
        """Rótulos abaixo do limiar são descartados."""
        regs = [{"id": str(i), "artist": "A" if i < 3 else "B"} for i in range(4)]
        assert build_label_vocab(regs, "artist", 2).labels == ["A"]

    def test_vocabulario_vazio(self):
        """Nenhum rótulo sobrevivente gera EmptyVocabularyError."""
        with pytest.raises(EmptyVocabularyError):
            build_label_vocab([{"id": "1", "artist": "A"}], "artist", 5)

    def test_min_samples_invalido(self):
        """min_samples < 1 é rejeitado."""
        with pytest.raises(InvalidArgumentError):
            build_label_vocab([{"id": "1", "artist": "A"}], "artist", 0)

    def test_ancora_ambigua_nao_conta(self):
        """Amostras com artista anônimo não entram nos vocabulários das outras tarefas."""
        vocabularios = build_vocabularies(registros_exemplo())
        assert vocabularios["artist"].labels == ["Rembrandt", "Vermeer"]
        assert vocabularios["type"].counts[vocabularios["type"].id_of("print")] == 2
        assert "material" in vocabularios

    def test_ancora_deve_ser_multiclass(self):
        """Tarefa âncora multilabel é rejeitada."""
        with pytest.raises(InvalidArgumentError):
            build_vocabularies(registros_exemplo(), anchor_task="type")

    def test_anchor_ids(self):
        """Ids âncora são None para artistas ambíguos."""
        regs = registros_exemplo()
        vocabulario = build_vocabularies(regs)["artist"]
        assert anchor_ids(regs, vocabulario) == [0, 0, 1, None, 1]

    def test_coortes(self):
        """Número de classes sobreviventes por limiar."""
        regs = [{"id": str(i), "artist": "A" if i < 5 else "B"} for i in range(7)]
        assert cohort_sizes(regs, "artist", [1, 3, 6]) == {1: 2, 3: 1, 6: 0}


class TestPeriodo:
    """Testes para resolve_period."""

    def test_ano_exato(self):
        """Ano exato passa direto."""
        assert resolve_period(1635) == 1635.0

    def test_intervalo_media(self):
        """Intervalo [1600, 1650] vira 1625."""
        assert resolve_period([1600, 1650]) == 1625.0

    def test_intervalo_degenerado(self):
        """Intervalo [a, a] vira a."""
        assert resolve_period([1700, 1700]) == 1700.0

    def test_intervalo_invertido(self):
        """Intervalo com início maior que o fim é rejeitado."""
        with pytest.raises(InvalidArgumentError):
            resolve_period([1650, 1600])

    @pytest.mark.parametrize("texto,esperado", [
        ("1600-1650", 1625.0),
        ("c. 1635", 1635.0),
        ("1635-05-01", 1635.0),
        ("1635", 1635.0),
    ])
    def test_texto(self, texto, esperado):
        """Textos de período comuns em catálogos são interpretados."""
        assert resolve_period(texto) == esperado

    def test_texto_irreconhecivel(self):
        """Texto sem data gera InvalidArgumentError."""
        with pytest.raises(InvalidArgumentError):
            resolve_period("sem data")

    def test_booleano(self):
        """Booleanos não são anos."""
        with pytest.raises(InvalidArgumentError):
            resolve_period(True)


class TestConjuntoDeDados:
    """Testes para build_dataset, task_targets e fit_period_stats."""

    def test_numero_de_linhas_divergente(self):
        """Características e metadados com tamanhos diferentes geram DataMismatchError."""
        with pytest.raises(DataMismatchError):
            build_dataset(np.zeros((4, 3), dtype=np.float32), registros_exemplo())

    def test_periodo_irreconhecivel(self):
        """Período em texto irreconhecível nos registros em memória é erro de formato."""
        registros = [{"id": "a", "artist": "A", "period": "sem data"}]
        with pytest.raises(FormatError):
            build_dataset(np.zeros((1, 3), dtype=np.float32), registros)

    def test_rotulos_e_mascaras(self):
        """Tarefas ausentes ficam mascaradas; âncora ambígua não tem rótulos."""
        conjunto = build_dataset(np.zeros((5, 3), dtype=np.float32), registros_exemplo())
        assert conjunto.available_tasks() == ["artist", "type", "material", "period"]
        assert conjunto.labels["artist"].tolist() == [0, 0, 1, -1, 1]
        _, mascara_material = conjunto.task_targets("material", np.arange(5))
        assert mascara_material.tolist() == [True, True, True, False, False]
        assert np.isnan(conjunto.labels["period"][3])
        assert conjunto.labels["period"][1] == 1645.0

    def test_multihot(self):
        """Alvos multilabel são vetores multi-hot no vocabulário."""
        conjunto = build_dataset(np.zeros((5, 3), dtype=np.float32), registros_exemplo())
        alvos, _ = conjunto.task_targets("type", np.array([1]))
        vocabulario = conjunto.vocabularies["type"]
        assert alvos[0, vocabulario.id_of("print")] == 1
        assert alvos[0, vocabulario.id_of("drawing")] == 1
        assert alvos.sum() == 2

    def test_periodo_exige_estatisticas(self):
        """Alvos de período sem estatísticas ajustadas são rejeitados."""
        conjunto = build_dataset(np.zeros((5, 3), dtype=np.float32), registros_exemplo())
        with pytest.raises(InvalidArgumentError):
            conjunto.task_targets("period", np.arange(5))

    def test_padronizacao_do_periodo(self):
        """Períodos são padronizados com média e desvio da partição de treino."""
        conjunto = build_dataset(np.zeros((5, 3), dtype=np.float32), registros_exemplo())
        conjunto.split = np.array(["train", "train", "val", "excluded", "test"])
        media, desvio = fit_period_stats(conjunto)
        assert media == 1640.0 and desvio == 5.0
        alvos, mascara = conjunto.task_targets("period", np.array([0, 1]))
        assert alvos.tolist() == [-1.0, 1.0]
        assert mascara.all()

    def test_desvio_zero(self):
        """Desvio nulo é substituído por 1."""
        regs = [{"id": str(i), "artist": "A", "period": 1600} for i in range(3)]
        conjunto = build_dataset(np.zeros((3, 2), dtype=np.float32), regs)
        conjunto.split = np.array(["train"] * 3)
        assert fit_period_stats(conjunto) == (1600.0, 1.0)


class TestDivisao:
    """Testes para split_counts, stratify_labels e SplitAssignment."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_contagens_dez(self):
        """Classe com 10 amostras: 7/2/1."""
        assert split_counts(10, (0.7, 0.2, 0.1)) == (7, 2, 1)

    def test_contagens_tres(self):
        """Classe com 3 amostras: 1/1/1."""
        assert split_counts(3, (0.7, 0.2, 0.1)) == (1, 1, 1)

    def test_dez_classes_de_dez(self):
        """10 classes de 10 amostras: 70/20/10 amostras por partição."""
        rotulos = [c for c in range(10) for _ in range(10)]
        ids = [f"s{i}" for i in range(100)]
        divisao = stratify_labels(ids, rotulos, (0.7, 0.2, 0.1), seed=0)
        assert divisao.counts() == {"train": 70, "val": 20, "test": 10}

    def test_classe_pequena(self):
        """Classe com 2 amostras gera StratificationError com o nome da classe."""
        with pytest.raises(StratificationError) as erro:
            stratify_labels(["a", "b", "c", "d", "e"], [0, 0, 0, 1, 1], seed=0, class_names=["X", "Y"])
        assert erro.value.classe == "Y"

    def test_excluidos(self):
        """Amostras sem rótulo âncora ficam em "excluded"."""
        divisao = stratify_labels(["a", "b", "c", "d"], [0, 0, None, 0], seed=1)
        assert divisao.assignments["c"] == "excluded"
        assert sorted(divisao.assignments[i] for i in "abd") == ["test", "train", "val"]

    def test_deterministica(self):
        """Mesma semente produz a mesma divisão; sementes diferentes tendem a divergir."""
        rotulos = [c for c in range(5) for _ in range(20)]
        ids = [f"s{i}" for i in range(100)]
        a = stratify_labels(ids, rotulos, seed=3)
        b = stratify_labels(ids, rotulos, seed=3)
        c = stratify_labels(ids, rotulos, seed=4)
        assert a.assignments == b.assignments
        assert a.assignments != c.assignments

    def test_proporcoes_invalidas(self):
        """Proporções que não somam 1 são rejeitadas."""
        with pytest.raises(InvalidArgumentError):
            stratify_labels(["a", "b", "c"], [0, 0, 0], (0.5, 0.2, 0.1))

    def test_salvar_e_carregar(self):
        """Arquivo de divisão é lido de volta igual."""
        divisao = stratify_labels([f"s{i}" for i in range(6)], [0, 0, 0, 1, 1, 1], seed=2)
        caminho = Path(self.temp_dir) / "splits.json"
        divisao.save(caminho)
        carregada = SplitAssignment.load(caminho)
        assert carregada.assignments == divisao.assignments
        assert carregada.seed == 2
        assert caminho.read_text(encoding='utf-8').endswith("}\n")

    def test_particao_invalida(self):
        """Arquivo com partição desconhecida gera FormatError."""
        caminho = Path(self.temp_dir) / "splits.json"
        caminho.write_text(json.dumps({"seed": 0, "ratios": [0.7, 0.2, 0.1],
                                       "assignments": {"a": "holdout"}}), encoding='utf-8')
        with pytest.raises(FormatError):
            SplitAssignment.load(caminho)

    def test_amostra_sem_particao(self):
        """Aplicar divisão que não cobre todas as amostras gera DataMismatchError."""
        conjunto = generate_synthetic(3, 5, 4, 1.0, seed=0)
        divisao = SplitAssignment({"syn-000000": "train"}, 0, (0.7, 0.2, 0.1))
        with pytest.raises(DataMismatchError):
            apply_split(conjunto, divisao)

    def test_divisao_do_conjunto(self):
        """stratified_split usa o artista como âncora e cobre todas as amostras."""
        conjunto = generate_synthetic(4, 10, 4, 1.0, seed=0)
        apply_split(conjunto, stratified_split(conjunto, seed=0))
        assert len(conjunto.indices("train")) == 28
        assert len(conjunto.indices("val")) == 8
        assert len(conjunto.indices("test")) == 4


class TestGeradorSintetico:
    """Testes para generate_synthetic."""

    def test_dimensoes(self):
        """N = classes × amostras por classe, D colunas."""
        conjunto = generate_synthetic(5, 10, 8, 0.9, seed=0)
        assert conjunto.features.shape == (50, 8)
        assert len(conjunto.vocabularies["artist"]) == 5
        assert conjunto.sample_ids[0] == "syn-000000"

    def test_deterministico(self):
        """Mesma semente produz os mesmos bytes e registros."""
        a = generate_synthetic(4, 6, 5, 0.5, seed=9)
        b = generate_synthetic(4, 6, 5, 0.5, seed=9)
        assert a.features.tobytes() == b.features.tobytes()
        assert a.records == b.records

    def test_entrelacamento_total(self):
        """Com entrelaçamento 1, cada artista tem um único tipo e seus materiais preferidos."""
        conjunto = generate_synthetic(6, 8, 4, 1.0, seed=1)
        tipos = {}
        for registro in conjunto.records:
            tipos.setdefault(registro["artist"], set()).update(registro["types"])
            numero = int(registro["artist"].split("_")[1])
            assert f"material_{numero:03d}" in registro["materials"]
            assert registro["generative"]["period_from_artist"]
        assert all(len(t) == 1 for t in tipos.values())

    def test_entrelacamento_nulo(self):
        """Com entrelaçamento 0, nenhum atributo segue o artista."""
        conjunto = generate_synthetic(4, 5, 4, 0.0, seed=2)
        for registro in conjunto.records:
            geradores = registro["generative"]
            assert not geradores["period_from_artist"]
            assert not geradores["type_from_artist"]
            assert not any(geradores["materials_from_artist"])

    def test_intervalos_de_periodo(self):
        """Parte dos períodos é escrita como intervalo de 20 anos."""
        conjunto = generate_synthetic(10, 20, 4, 0.9, seed=3)
        intervalos = [r["period"] for r in conjunto.records if isinstance(r["period"], list)]
        assert intervalos
        assert all(b - a == pytest.approx(20.0) for a, b in intervalos)

    def test_parametros_invalidos(self):
        """Entrelaçamento fora de [0, 1] ou tamanhos nulos são rejeitados."""
        with pytest.raises(InvalidArgumentError):
            generate_synthetic(3, 5, 4, 1.5, seed=0)
        with pytest.raises(InvalidArgumentError):
            generate_synthetic(0, 5, 4, 0.5, seed=0)
