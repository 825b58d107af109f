import numpy as np
import pytest

from dissdim import aniso_measure as am
from dissdim import fixtures as fx
from dissdim import io as dio


@pytest.fixture
def sample_measure():
    rng = np.random.default_rng(11)
    return am.AtomicMeasure(rng.random((40, 2)), rng.random(40), rng.random(40), d=2)


@pytest.fixture
def sample_field():
    return fx.burgers_entropy_solution(fx.RiemannDatum(1.0, -1.0), -1.0, 1.0, 33, 0.5, 17)


class TestMeasureFormat:
    def test_text_roundtrip(self, sample_measure, tmp_path):
        path = tmp_path / "m.txt"
        dio.write_measure(path, sample_measure, binary=False)
        back = dio.read_measure(path)
        assert back.d == 2
        assert np.array_equal(back.positions, sample_measure.positions)
        assert np.array_equal(back.times, sample_measure.times)
        assert np.array_equal(back.weights, sample_measure.weights)

    def test_binary_roundtrip(self, sample_measure, tmp_path):
        path = tmp_path / "m.bin"
        dio.write_measure(path, sample_measure, binary=True)
        back = dio.read_measure(path)
        assert np.array_equal(back.positions, sample_measure.positions)
        assert np.array_equal(back.weights, sample_measure.weights)

    def test_header_contents(self, sample_measure, tmp_path):
        path = tmp_path / "m.txt"
        dio.write_measure(path, sample_measure)
        first = open(path, "rb").readline().decode()
        assert first.startswith("dissdim-measure v1 d=2 n=40")

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("something else\n")
        with pytest.raises(dio.MalformedFileError):
            dio.read_measure(path)

    def test_short_body_reports_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("dissdim-measure v1 d=1 n=3\n0.0 0.0 1.0\n")
        with pytest.raises(dio.MalformedFileError) as err:
            dio.read_measure(path)
        assert err.value.line is not None

    def test_bad_column_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("dissdim-measure v1 d=1 n=1\n0.0 0.0\n")
        with pytest.raises(dio.MalformedFileError):
            dio.read_measure(path)

    def test_empty_measure(self, tmp_path):
        empty = am.AtomicMeasure(np.zeros((0, 1)), np.zeros(0), np.zeros(0), d=1)
        path = tmp_path / "empty.txt"
        dio.write_measure(path, empty)
        assert dio.read_measure(path).n_atoms == 0


class TestFieldFormat:
    def test_binary_roundtrip(self, sample_field, tmp_path):
        path = tmp_path / "f.bin"
        dio.write_field(path, sample_field)
        back = dio.read_field(path)
        assert back.d == sample_field.d
        assert back.nx == sample_field.nx
        assert np.array_equal(back.u, sample_field.u)
        assert back.p is None

    def test_csv_roundtrip_d1(self, sample_field, tmp_path):
        path = tmp_path / "f.csv"
        dio.write_field(path, sample_field, binary=False)
        back = dio.read_field(path)
        assert np.array_equal(back.u, sample_field.u)

    def test_with_pressure_and_scalar(self, tmp_path):
        field = fx.constant_field([0.3], 1, 0.0, 1.0, 9, 1.0, 5, pressure=2.0)
        field.theta = np.full((5, 9), -1.5)
        path = tmp_path / "f.bin"
        dio.write_field(path, field)
        back = dio.read_field(path)
        assert np.array_equal(back.p, field.p)
        assert np.array_equal(back.theta, field.theta)

    def test_csv_rejected_for_d2(self, tmp_path):
        field = fx.constant_field([0.1, 0.2], 2, 0.0, 1.0, 5, 1.0, 3)
        with pytest.raises(ValueError):
            dio.write_field(tmp_path / "f.csv", field, binary=False)

    def test_wrong_payload_size(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"dissdim-field v1 d=2 nx=4 nt=2 a=0.0 b=1.0 T=1.0 components=u\n1234")
        with pytest.raises(dio.MalformedFileError):
            dio.read_field(path)


class TestReportCsv:
    def test_ladder_csv_shape(self):
        mu = fx.burgers_dissipation_measure(fx.RiemannDatum(1.0, -1.0), 1.0, 512)
        lad = am.density_ladder(mu, 1.0, 1.0, [0.1, 0.05, 0.025], top_k=32)
        text = dio.ladder_csv(lad)
        lines = text.strip().split("\n")
        assert lines[0] == "delta,density,fit_slope,residual"
        assert len(lines) == 4

    def test_box_count_csv_deterministic(self):
        pts = fx.time_singular_measure_fixture(1, 512, seed=1).support_points()
        scales = [0.25, 0.125, 0.0625]
        res = am.box_counting_dimension(pts, 1.0, scales)
        assert dio.box_count_csv(scales, res) == dio.box_count_csv(scales, res)
