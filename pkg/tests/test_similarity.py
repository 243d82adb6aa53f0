import math
import random

import pytest

import mmlkit
from mmlkit import (
    CostConfig,
    EmptyHistogram,
    GroundDistance,
    Histogram,
    MissingBranch,
)

import generators
import oracles

NS = mmlkit.MATHML_NS


class TestHistogramType:
    def test_zero_counts_dropped(self):
        assert Histogram({"mi": 0, "mo": 2}) == Histogram({"mo": 2})
        assert Histogram({"mi": 0}).total == 0

    def test_total(self):
        assert Histogram({"mi": 2, "mo": 3}).total == 5
        assert Histogram().total == 0

    def test_getitem_defaults_to_zero(self):
        hist = Histogram({"mi": 2})
        assert hist["mi"] == 2
        assert hist["mo"] == 0

    def test_validation(self):
        with pytest.raises(ValueError):
            Histogram({"mi": -1})
        with pytest.raises(TypeError):
            Histogram({"mi": 1.5})
        with pytest.raises(TypeError):
            Histogram({"mi": True})
        with pytest.raises(TypeError):
            Histogram({3: 1})

    def test_to_text_sorted(self):
        hist = Histogram({"mi": 2, "apply": 1, "ci": 2})
        assert hist.to_text() == "apply\t1\nci\t2\nmi\t2\n"
        assert Histogram().to_text() == ""

    def test_from_elements(self):
        assert Histogram.from_elements(["mi", "mi", "mo"]) == Histogram({"mi": 2, "mo": 1})


class TestHistogramOp:
    def test_presentation_scope(self, listing1_doc):
        hist = mmlkit.histogram(listing1_doc, "presentation")
        assert dict(hist.counts) == {"mfrac": 1, "mi": 2}
        assert hist.total == 3

    def test_whole_scope_excludes_structural(self, listing1_doc):
        hist = mmlkit.histogram(listing1_doc, "whole")
        assert dict(hist.counts) == {"mfrac": 1, "mi": 2, "apply": 1, "divide": 1, "ci": 2}
        assert hist.total == 7

    def test_whole_scope_with_structural(self, listing1_doc):
        hist = mmlkit.histogram(listing1_doc, "whole", include_structural=True)
        assert hist["math"] == 1
        assert hist["semantics"] == 1
        assert hist["annotation-xml"] == 1
        assert hist["annotation"] == 1
        assert hist.total == 11

    def test_content_scope(self, listing1_doc):
        assert dict(mmlkit.histogram(listing1_doc, "content").counts) == {
            "apply": 1, "divide": 1, "ci": 2
        }

    def test_empty_math_gives_empty_histogram(self):
        doc, _ = mmlkit.parse(f'<math xmlns="{NS}"/>')
        assert mmlkit.histogram(doc, "whole").total == 0

    def test_missing_scope(self):
        doc, _ = mmlkit.parse(f'<math xmlns="{NS}"><mi>x</mi></math>')
        with pytest.raises(MissingBranch):
            mmlkit.histogram(doc, "content")
        with pytest.raises(ValueError):
            mmlkit.histogram(doc, "sideways")

    def test_accumulate(self):
        a = Histogram({"mi": 2})
        b = Histogram({"mi": 1, "mo": 1})
        assert mmlkit.accumulate([a, b]) == Histogram({"mi": 3, "mo": 1})
        assert mmlkit.accumulate([]) == Histogram()
        assert mmlkit.accumulate([a, Histogram()]) == a

    def test_accumulate_associative_commutative(self):
        rng = random.Random(67)
        for _ in range(30):
            hs = [Histogram(generators.random_histogram(rng)) for _ in range(3)]
            a, b, c = hs
            assert mmlkit.accumulate([mmlkit.accumulate([a, b]), c]) == mmlkit.accumulate(
                [a, mmlkit.accumulate([b, c])]
            )
            assert mmlkit.accumulate([a, b]) == mmlkit.accumulate([b, a])


class TestHistogramDistances:
    def test_absolute_frozen_values(self):
        a = Histogram({"mfrac": 1, "mi": 2})
        assert mmlkit.hist_distance_absolute(a, a) == 0
        assert mmlkit.hist_distance_absolute(a, Histogram({"mi": 3})) == 2
        assert mmlkit.hist_distance_absolute(Histogram(), Histogram({"mi": 3})) == 3

    def test_relative_frozen_values(self):
        a = Histogram({"mfrac": 1, "mi": 2})
        assert mmlkit.hist_distance_relative(a, a) == 0
        assert mmlkit.hist_distance_relative(a, Histogram({"mi": 3})) == pytest.approx(1 / 3)
        assert mmlkit.hist_distance_relative(Histogram({"mi": 2}), Histogram({"mo": 3})) == 1
        assert mmlkit.hist_distance_relative(Histogram(), Histogram()) == 0

    def test_absolute_metric_axioms(self):
        rng = random.Random(71)
        for _ in range(200):
            a = Histogram(generators.random_histogram(rng))
            b = Histogram(generators.random_histogram(rng))
            c = Histogram(generators.random_histogram(rng))
            dab = mmlkit.hist_distance_absolute(a, b)
            assert dab >= 0
            assert (dab == 0) == (a == b)
            assert dab == mmlkit.hist_distance_absolute(b, a)
            assert dab <= (
                mmlkit.hist_distance_absolute(a, c) + mmlkit.hist_distance_absolute(c, b)
            ) + 1e-9

    def test_relative_bounds_and_disjoint_maximum(self):
        rng = random.Random(73)
        for _ in range(100):
            a = Histogram(generators.random_histogram(rng))
            b = Histogram(generators.random_histogram(rng))
            value = mmlkit.hist_distance_relative(a, b)
            assert 0 <= value <= 1
            disjoint = not (set(a.counts) & set(b.counts))
            assert (value == 1) == disjoint


class TestCosine:
    def test_identity_is_exactly_one(self):
        hist = Histogram({"mfrac": 1, "mi": 2})
        assert mmlkit.cosine_similarity(hist, hist) == 1.0

    def test_scale_invariance_exact(self):
        rng = random.Random(79)
        for _ in range(50):
            counts = generators.random_histogram(rng)
            a = Histogram(counts)
            b = Histogram({k: v * 3 for k, v in counts.items()})
            assert abs(mmlkit.cosine_similarity(a, b) - 1.0) <= 1e-12

    def test_disjoint_is_zero(self):
        assert mmlkit.cosine_similarity(Histogram({"mi": 2}), Histogram({"mo": 3})) == 0.0

    def test_frozen_value(self):
        value = mmlkit.cosine_similarity(
            Histogram({"mfrac": 1, "mi": 2}), Histogram({"mi": 3})
        )
        assert value == pytest.approx(2 / math.sqrt(5), abs=1e-12)

    def test_bounds(self):
        rng = random.Random(83)
        for _ in range(200):
            a = Histogram(generators.random_histogram(rng))
            b = Histogram(generators.random_histogram(rng))
            assert 0.0 <= mmlkit.cosine_similarity(a, b) <= 1.0

    def test_empty_rejected(self):
        with pytest.raises(EmptyHistogram):
            mmlkit.cosine_similarity(Histogram(), Histogram({"mi": 1}))


class TestCostConfig:
    def test_defaults(self):
        costs = CostConfig()
        assert (costs.insert, costs.delete, costs.rename) == (1.0, 1.0, 1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            CostConfig(insert=-1)
        with pytest.raises(ValueError):
            CostConfig(delete=math.inf)
        with pytest.raises(TypeError):
            CostConfig(rename="free")


def pres(text):
    doc, _ = mmlkit.parse(f'<math xmlns="{NS}">{text}</math>')
    return doc.node(1)


class TestTreeEditDistance:
    def test_identity(self, listing1_doc):
        assert mmlkit.tree_edit_distance(listing1_doc, listing1_doc) == 0.0

    def test_single_rename(self):
        a = pres("<mfrac><mi>a</mi><mi>b</mi></mfrac>")
        b = pres("<mrow><mi>a</mi><mi>b</mi></mrow>")
        assert mmlkit.tree_edit_distance(a, b) == 1.0

    def test_fraction_to_leaf(self):
        # one mi maps across, mfrac and the other mi are deleted
        a = pres("<mfrac><mi>a</mi><mi>b</mi></mfrac>")
        b = pres("<mi>a</mi>")
        assert mmlkit.tree_edit_distance(a, b) == 2.0
        assert oracles.ted_reference(
            oracles.as_label_tree(a), oracles.as_label_tree(b)
        ) == 2.0

    def test_accepts_docs_and_nodes(self, listing1_doc):
        node = listing1_doc.root
        assert mmlkit.tree_edit_distance(listing1_doc, node) == 0.0

    def test_asymmetric_costs(self):
        a = pres("<mrow><mi>x</mi></mrow>")
        b = pres("<mi>x</mi>")
        # removal of the mrow wrapper costs delete; opposite direction costs insert
        assert mmlkit.tree_edit_distance(a, b, CostConfig(delete=3.0)) == 3.0
        assert mmlkit.tree_edit_distance(b, a, CostConfig(insert=5.0)) == 5.0

    def test_zero_rename_collapses_labels(self):
        a = pres("<mrow><mi>x</mi><mo>+</mo></mrow>")
        b = pres("<mfrac><mn>1</mn><mn>2</mn></mfrac>")
        assert mmlkit.tree_edit_distance(a, b, CostConfig(rename=0.0)) == 0.0

    def test_label_mode_name_text(self):
        a = pres("<mi>x</mi>")
        b = pres("<mi>y</mi>")
        assert mmlkit.tree_edit_distance(a, b) == 0.0
        assert mmlkit.tree_edit_distance(a, b, label_mode="name-text") == 1.0
        with pytest.raises(ValueError):
            mmlkit.tree_edit_distance(a, b, label_mode="full")

    def test_matches_reference_random_unit_costs(self):
        rng = random.Random(89)
        for _ in range(60):
            ta = generators.random_label_tree(rng)
            tb = generators.random_label_tree(rng)
            expected = oracles.ted_reference(ta, tb)
            actual = mmlkit.tree_edit_distance(
                generators.label_tree_to_node(ta), generators.label_tree_to_node(tb)
            )
            assert actual == pytest.approx(expected, abs=1e-9)

    def test_matches_reference_random_costs(self):
        rng = random.Random(97)
        for _ in range(40):
            ta = generators.random_label_tree(rng)
            tb = generators.random_label_tree(rng)
            ins = rng.choice([0.0, 0.5, 1.0, 2.5])
            dele = rng.choice([0.0, 0.5, 1.0, 3.0])
            ren = rng.choice([0.0, 0.7, 1.0, 2.0])
            expected = oracles.ted_reference(ta, tb, ins, dele, ren)
            actual = mmlkit.tree_edit_distance(
                generators.label_tree_to_node(ta),
                generators.label_tree_to_node(tb),
                CostConfig(insert=ins, delete=dele, rename=ren),
            )
            assert actual == pytest.approx(expected, abs=1e-9)

    def test_metric_axioms_unit_costs(self):
        rng = random.Random(101)
        trees = [generators.random_label_tree(rng, 6) for _ in range(12)]
        nodes = [generators.label_tree_to_node(t) for t in trees]
        for i, a in enumerate(nodes):
            assert mmlkit.tree_edit_distance(a, a) == 0.0
            for b in nodes[i + 1:]:
                dab = mmlkit.tree_edit_distance(a, b)
                assert dab == mmlkit.tree_edit_distance(b, a)
                assert dab >= 0
        for a in nodes[:6]:
            for b in nodes[:6]:
                for c in nodes[:6]:
                    assert mmlkit.tree_edit_distance(a, b) <= (
                        mmlkit.tree_edit_distance(a, c) + mmlkit.tree_edit_distance(c, b)
                    ) + 1e-9

    def test_delete_all_insert_all_upper_bound(self):
        rng = random.Random(103)
        for _ in range(40):
            ta = generators.random_label_tree(rng)
            tb = generators.random_label_tree(rng)
            ins = rng.uniform(0.1, 2.0)
            dele = rng.uniform(0.1, 2.0)
            bound = dele * oracles.tree_size(ta) + ins * oracles.tree_size(tb)
            actual = mmlkit.tree_edit_distance(
                generators.label_tree_to_node(ta),
                generators.label_tree_to_node(tb),
                CostConfig(insert=ins, delete=dele, rename=1.0),
            )
            assert actual <= bound + 1e-9


class TestGroundDistance:
    def test_discrete_default(self):
        ground = GroundDistance()
        assert ground.distance("mi", "mi") == 0.0
        assert ground.distance("mi", "mo") == 1.0

    def test_overrides_symmetric(self):
        ground = GroundDistance({("mo", "mi"): 0.25})
        assert ground.distance("mi", "mo") == 0.25
        assert ground.distance("mo", "mi") == 0.25

    def test_validation(self):
        with pytest.raises(ValueError):
            GroundDistance({("mi", "mo"): -1.0})
        with pytest.raises(ValueError):
            GroundDistance({("mi", "mi"): 2.0})
        GroundDistance({("mi", "mi"): 0.0})  # explicit zero diagonal is fine


class TestEmd:
    def test_identical_is_zero(self):
        hist = Histogram({"mi": 2, "mo": 1})
        assert mmlkit.emd(hist, hist) == 0.0

    def test_two_point_case(self):
        assert mmlkit.emd(Histogram({"mi": 1}), Histogram({"mo": 1})) == 1.0

    def test_frozen_value(self):
        value = mmlkit.emd(Histogram({"mfrac": 1, "mi": 2}), Histogram({"mi": 3}))
        assert value == pytest.approx(1 / 3, abs=1e-12)

    def test_normalization_makes_scaling_invisible(self):
        a = Histogram({"mi": 1, "mo": 2})
        b = Histogram({"mi": 3, "mo": 6})
        assert mmlkit.emd(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(EmptyHistogram):
            mmlkit.emd(Histogram(), Histogram({"mi": 1}))

    def test_matches_half_l1_closed_form(self):
        rng = random.Random(107)
        for _ in range(300):
            a = generators.random_histogram(rng)
            b = generators.random_histogram(rng)
            expected = oracles.emd_half_l1(a, b)
            assert mmlkit.emd(Histogram(a), Histogram(b)) == pytest.approx(
                expected, abs=1e-9
            )

    def test_matches_assignment_oracle_with_overrides(self):
        rng = random.Random(109)
        for _ in range(40):
            a = generators.random_histogram(rng, max_keys=4, max_count=4)
            b = generators.random_histogram(rng, max_keys=4, max_count=4)
            keys = sorted(set(a) | set(b))
            overrides = {}
            for i, x in enumerate(keys):
                for y in keys[i + 1:]:
                    if rng.random() < 0.5:
                        overrides[(x, y)] = rng.choice([0.25, 0.5, 2.0])
            ground = GroundDistance(overrides)
            expected = oracles.emd_assignment(a, b, ground.distance)
            assert mmlkit.emd(Histogram(a), Histogram(b), ground) == pytest.approx(
                expected, abs=1e-9
            )

    def test_oracles_agree_on_tiny_cases(self):
        rng = random.Random(113)
        for _ in range(15):
            a = generators.random_histogram(rng, max_keys=2, max_count=2)
            b = generators.random_histogram(rng, max_keys=2, max_count=2)
            if math.lcm(sum(a.values()), sum(b.values())) > 6:
                continue
            ground = GroundDistance({("mi", "mo"): 0.5})
            brute = oracles.emd_bruteforce(a, b, ground.distance)
            hungarian = oracles.emd_assignment(a, b, ground.distance)
            assert brute == pytest.approx(hungarian, abs=1e-12)
            assert mmlkit.emd(Histogram(a), Histogram(b), ground) == pytest.approx(
                brute, abs=1e-9
            )

    def test_override_ground_changes_cost(self):
        ground = GroundDistance({("mi", "mo"): 0.5})
        assert mmlkit.emd(Histogram({"mi": 1}), Histogram({"mo": 1}), ground) == 0.5


class TestDocumentDistance:
    def test_identity(self, listing1_doc):
        docs = [listing1_doc]
        assert mmlkit.document_distance(docs, docs, "emd") == 0.0
        assert mmlkit.document_distance(docs, docs, "cosine") == 1.0

    def test_duplication_is_invisible(self, listing1_doc):
        a = [listing1_doc]
        b = [listing1_doc, listing1_doc]
        assert abs(mmlkit.document_distance(a, b, "cosine") - 1.0) <= 1e-12
        assert abs(mmlkit.document_distance(a, b, "emd")) <= 1e-12

    def test_accumulates_before_comparing(self, listing1_doc):
        doc2, _ = mmlkit.parse(f'<math xmlns="{NS}"><mrow><mi>x</mi><mo>!</mo></mrow></math>')
        expected = mmlkit.emd(
            mmlkit.accumulate([
                mmlkit.histogram(listing1_doc), mmlkit.histogram(doc2)
            ]),
            mmlkit.histogram(doc2),
        )
        assert mmlkit.document_distance([listing1_doc, doc2], [doc2], "emd") == expected

    def test_scope_passthrough(self, listing1_doc):
        value = mmlkit.document_distance(
            [listing1_doc], [listing1_doc], "cosine", scope="presentation"
        )
        assert value == 1.0

    def test_validation(self, listing1_doc):
        with pytest.raises(ValueError):
            mmlkit.document_distance([], [listing1_doc], "emd")
        with pytest.raises(ValueError):
            mmlkit.document_distance([listing1_doc], [listing1_doc], "ted")
