import json
import math

import numpy as np
import pytest

import curvcomp.model_spaces as ms
from curvcomp import documents as docs
from curvcomp import extension as ex
from curvcomp import fixtures


@pytest.fixture
def sixpoint_doc():
    return fixtures.sixpoint()


class TestMetricDocument:
    def test_json_round_trip_bitwise(self, sixpoint_doc):
        text = sixpoint_doc.to_json()
        back = docs.MetricDocument.from_json(text)
        assert back.labels == sixpoint_doc.labels
        assert np.array_equal(back.d, sixpoint_doc.d)
        assert back.kappa == sixpoint_doc.kappa
        assert back.to_json() == text

    def test_csv_round_trip(self, sixpoint_doc):
        text = sixpoint_doc.to_decrypting_csv()
        back = docs.MetricDocument.from_decrypting_csv(text)
        assert back.labels == sixpoint_doc.labels
        assert np.max(np.abs(back.d - sixpoint_doc.d)) < 1e-12

    def test_csv_squares_entries(self):
        text = "a,b\n0,4\n4,0\n"
        doc = docs.MetricDocument.from_decrypting_csv(text)
        assert doc.d[0, 1] == pytest.approx(2.0)

    def test_validation(self):
        with pytest.raises(docs.DocumentError):
            docs.MetricDocument("m", ("a", "b"), np.array([[0.0, 1.0]]))
        with pytest.raises(docs.DocumentError):
            docs.MetricDocument(
                "m", ("a", "b"), np.array([[0.0, 1.0], [2.0, 0.0]])
            )
        with pytest.raises(docs.DocumentError):
            docs.MetricDocument(
                "m", ("a", "b"), np.array([[0.0, 1.0], [1.0, 0.0]]),
                basepoint="zz",
            )

    def test_bad_json(self):
        with pytest.raises(docs.DocumentError):
            docs.MetricDocument.from_json("{not json")
        with pytest.raises(docs.DocumentError):
            docs.MetricDocument.from_json("{\"labels\": [\"a\"]}")

    def test_sniffing(self, sixpoint_doc):
        assert docs.ingest_metric(sixpoint_doc.to_json()).labels == sixpoint_doc.labels
        assert (
            docs.ingest_metric(sixpoint_doc.to_decrypting_csv()).labels
            == sixpoint_doc.labels
        )
        with pytest.raises(docs.DocumentError):
            docs.ingest_metric("x", fmt="yaml")


class TestInstanceDocument:
    def test_round_trip(self):
        inst = ex.ExtensionInstance(
            (
                ms.ModelPoint(np.array([0.0, 0.0]), ms.FLAT),
                ms.ModelPoint(np.array([2.0, 0.0]), ms.FLAT),
            ),
            np.array([0.5, 0.5]),
        )
        back = docs.instance_from_json(docs.instance_to_json(inst))
        assert back.kappa == inst.kappa
        assert np.array_equal(back.radii, inst.radii)
        assert all(
            np.array_equal(a.coords, b.coords)
            for a, b in zip(back.targets, inst.targets)
        )

    def test_curved_ambient_dimension(self):
        obj = {
            "kappa": 1.0,
            "chart_dim": 1,
            "targets": [[1.0, 0.0]],
            "radii": [0.5],
            "center": [1.0, 0.0],
        }
        inst = docs.instance_from_json(json.dumps(obj))
        assert inst.targets[0].chart == ms.SPHERE

    def test_dimension_mismatch(self):
        obj = {"kappa": 1.0, "chart_dim": 2, "targets": [[1.0, 0.0]],
               "radii": [0.5], "center": [1.0, 0.0, 0.0]}
        with pytest.raises(docs.DocumentError):
            docs.instance_from_json(json.dumps(obj))

    def test_missing_key(self):
        with pytest.raises(docs.DocumentError):
            docs.instance_from_json("{\"kappa\": 0.0}")


class TestMapDocument:
    def test_round_trip(self):
        f = fixtures.hemisphere(4)
        back = docs.map_from_json(docs.map_to_json(f))
        assert back.kappa == f.kappa
        assert set(back.assigned) == set(f.assigned)
        for k in f.assigned:
            assert np.allclose(back.assigned[k].coords, f.assigned[k].coords)
        assert np.allclose(back.center.coords, f.center.coords)

    def test_unknown_label_rejected(self):
        f = fixtures.hemisphere(4)
        obj = json.loads(docs.map_to_json(f))
        obj["assigned"]["ghost"] = [1.0, 0.0]
        with pytest.raises(docs.DocumentError):
            docs.map_from_json(json.dumps(obj))


class TestSniffDocument:
    def test_kinds(self, sixpoint_doc):
        assert docs.sniff_document(sixpoint_doc.to_json()) == "metric"
        assert docs.sniff_document(sixpoint_doc.to_decrypting_csv()) == "csv"
        f = fixtures.hemisphere(4)
        assert docs.sniff_document(docs.map_to_json(f)) == "map"
        inst = ex.ExtensionInstance(
            (ms.ModelPoint(np.array([0.0, 0.0]), ms.FLAT),), np.array([1.0])
        )
        assert docs.sniff_document(docs.instance_to_json(inst)) == "instance"


class TestFixtures:
    def test_sixpoint_defining_relations(self, sixpoint_doc):
        m = sixpoint_doc.to_finite_metric()
        assert m.d[m.index("a"), m.index("b")] == 4.0
        for lab in ("x", "y", "z"):
            assert m.d[m.index("a"), m.index(lab)] == 2.0
            assert m.d[m.index("b"), m.index(lab)] == 2.0
        assert m.d[m.index("x"), m.index("y")] == 2.0
        assert m.d[m.index("y"), m.index("z")] == 1.0
        assert m.d[m.index("x"), m.index("z")] == 3.0
        assert m.d[m.index("q"), m.index("y")] == pytest.approx(math.sqrt(3))
        assert m.d[m.index("q"), m.index("z")] == pytest.approx(math.sqrt(7))

    def test_hemisphere_shape(self):
        f = fixtures.hemisphere(8)
        assert f.kappa == 1.0
        assert len(f.assigned) == 8
        for p in f.assigned.values():
            assert len(p.coords) == 2
            assert np.linalg.norm(p.coords) == pytest.approx(1.0)
        i = f.source.index("pole")
        row = np.delete(f.source.d[i], i)
        assert np.allclose(row, math.pi / 2)

    def test_tree_sample_is_metric(self):
        doc = fixtures.tree_sample(n=6, seed=3)
        m = doc.to_finite_metric()
        assert m.triangle_audit() == []

    def test_sphere_sample_distances(self):
        doc = fixtures.sphere_sample(n=5, seed=1)
        assert np.max(doc.d) <= math.pi + 1e-12

    def test_get_fixture_unknown(self):
        with pytest.raises(ValueError):
            fixtures.get_fixture("nope")
