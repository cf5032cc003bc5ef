import numpy as np
import pytest

from hqcw_viz.cli import main
from hqcw_viz.render import (
    FigureSpec,
    build_figure,
    load_embedding_csv,
    load_labels,
    project_2d,
)


class TestLoaders:
    def test_embedding_roundtrip(self, embedding_factory):
        path = embedding_factory("a.csv", seed=1)
        matrix = load_embedding_csv(path)
        assert matrix.shape == (100, 32)

    def test_embedding_rejects_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n0,1\n")
        with pytest.raises(ValueError, match="header"):
            load_embedding_csv(path)

    def test_labels(self, labels_file, labels):
        assert np.array_equal(load_labels(labels_file), labels)

    def test_labels_missing_node(self, tmp_path):
        path = tmp_path / "g.edgelist"
        path.write_text("#nodes 3\n0\t1\t1\n#label\t0\t0\n#label\t2\t1\n")
        with pytest.raises(ValueError, match="cover"):
            load_labels(path)


class TestFigure:
    def test_single_panel_counts(self, embedding_factory, labels_file, tmp_path):
        spec = FigureSpec(
            panels=[(str(embedding_factory("a.csv", seed=1)), "one")],
            labels_path=str(labels_file),
            output_path=str(tmp_path / "fig.png"),
            seed=0,
        )
        fig = build_figure(spec)
        axes = [ax for ax in fig.axes if ax.has_data()]
        assert len(axes) == 1
        points = sum(len(c.get_offsets()) for c in axes[0].collections)
        assert points == 100
        assert len(axes[0].get_legend().get_texts()) == 4

    def test_grid_layouts(self, embedding_factory, labels_file, tmp_path):
        files = [str(embedding_factory(f"{i}.csv", seed=i)) for i in range(8)]
        for n_panels, shape in ((4, (2, 2)), (8, (2, 4))):
            spec = FigureSpec(
                panels=[(f, f"panel {i}") for i, f in enumerate(files[:n_panels])],
                labels_path=str(labels_file),
                output_path=str(tmp_path / f"fig{n_panels}.png"),
            )
            fig = build_figure(spec)
            rows = {ax.get_subplotspec().rowspan.start for ax in fig.axes}
            cols = {ax.get_subplotspec().colspan.start for ax in fig.axes}
            assert (len(rows), len(cols)) == shape

    def test_perplexity_must_be_below_point_count(self, embedding_factory, labels_file, tmp_path):
        spec = FigureSpec(
            panels=[(str(embedding_factory("a.csv", seed=1)), "one")],
            labels_path=str(labels_file),
            output_path=str(tmp_path / "fig.png"),
            perplexity=100,
        )
        with pytest.raises(ValueError, match="perplexity"):
            build_figure(spec)

    def test_projection_deterministic(self, embedding_factory):
        matrix = load_embedding_csv(embedding_factory("a.csv", seed=4))
        first = project_2d(matrix, 30.0, 500, seed=9)
        second = project_2d(matrix, 30.0, 500, seed=9)
        assert np.array_equal(first, second)


class TestCli:
    def test_render_command(self, embedding_factory, labels_file, tmp_path):
        out = tmp_path / "cli.png"
        code = main([
            "render",
            f"{embedding_factory('a.csv', seed=2)}:alpha 0.8",
            str(embedding_factory("b.csv", seed=3)),
            "--labels", str(labels_file),
            "--out", str(out),
            "--perplexity", "20",
            "--iterations", "400",
            "--seed", "1",
        ])
        assert code == 0
        assert out.exists() and out.stat().st_size > 0

    def test_missing_file_is_an_error(self, labels_file, tmp_path, capsys):
        code = main([
            "render", str(tmp_path / "missing.csv"),
            "--labels", str(labels_file), "--out", str(tmp_path / "x.png"),
        ])
        assert code == 1
        assert "error:" in capsys.readouterr().err
