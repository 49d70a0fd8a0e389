import struct

import numpy as np
import pytest

from conftest import crandn
from tmnn.io import (CorruptHeaderError, TensorFileError, UnsupportedVersionError, load_tensor,
                     save_tensor)
from tmnn.phantoms import PhantomSpec, make_cine_phantom, make_perfusion_phantom
from tmnn.tensor import mode3_unfold


def casorati_sv(x):
    return np.linalg.svd(mode3_unfold(x), compute_uv=False)


def numerical_rank(x, rel=1e-6):
    s = casorati_sv(x)
    return int(np.sum(s > rel * s[0]))


class TestCine:
    def test_static_when_no_motion(self):
        x = make_cine_phantom(PhantomSpec("cine", motion_amplitude=0.0))
        assert all(np.array_equal(x[:, :, 0], x[:, :, t]) for t in range(x.shape[2]))
        assert numerical_rank(x) == 1

    def test_default_low_rank(self):
        x = make_cine_phantom(PhantomSpec("cine"))
        assert x.shape == (64, 64, 10)
        assert numerical_rank(x) <= 6

    def test_compressible(self):
        s = casorati_sv(make_cine_phantom(PhantomSpec("cine")))
        assert np.sqrt(np.sum(s[6:] ** 2) / np.sum(s ** 2)) < 0.05

    def test_deterministic(self):
        a = make_cine_phantom(PhantomSpec("cine", seed=3))
        assert np.array_equal(a, make_cine_phantom(PhantomSpec("cine", seed=3)))
        assert not np.array_equal(a, make_cine_phantom(PhantomSpec("cine", seed=4)))

    def test_complex_with_phase(self):
        x = make_cine_phantom(PhantomSpec("cine"))
        assert np.iscomplexobj(x) and np.abs(np.angle(x[np.abs(x) > 1e-3])).max() > 0.05

    def test_moving_chamber(self):
        x = make_cine_phantom(PhantomSpec("cine"))
        assert np.linalg.norm(x[:, :, 2] - x[:, :, 7]) > 0.05 * np.linalg.norm(x[:, :, 2])

    def test_kind_mismatch(self):
        with pytest.raises(ValueError):
            make_cine_phantom(PhantomSpec("perfusion"))


class TestPerfusion:
    def test_static_without_uptake(self):
        assert numerical_rank(make_perfusion_phantom(PhantomSpec("perfusion", uptake_rate=0.0))) == 1

    def test_rank_two(self):
        x = make_perfusion_phantom(PhantomSpec("perfusion"))
        assert x.shape == (48, 24, 32)
        assert numerical_rank(x) <= 2

    def test_uptake_curve_shape(self):
        spec = PhantomSpec("perfusion")
        x = make_perfusion_phantom(spec)
        static = make_perfusion_phantom(PhantomSpec("perfusion", uptake_rate=0.0))
        dyn = (x - static).reshape(-1, spec.n3)
        # every dynamic temporal profile is a multiple of one curve
        assert np.linalg.matrix_rank(dyn, tol=1e-10 * np.abs(dyn).max()) == 1
        curve = np.abs(dyn).max(axis=0)
        peak = int(np.argmax(curve))
        assert 0 < peak < spec.n3 - 1 and curve[0] == 0

    def test_deterministic(self):
        spec = PhantomSpec("perfusion", seed=9)
        assert np.array_equal(make_perfusion_phantom(spec), make_perfusion_phantom(spec))


class TestSpec:
    @pytest.mark.parametrize("kw", [dict(n1=4), dict(n3=1), dict(kind="brain"), dict(intensity=0)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            PhantomSpec(**kw)


class TestCTN3:
    def test_roundtrip_bit_exact(self, rng, tmp_path):
        x = crandn(rng, 5, 4, 3)
        save_tensor(tmp_path / "x.ctn3", x)
        y = load_tensor(tmp_path / "x.ctn3")
        assert y.shape == x.shape and y.tobytes() == x.astype(np.complex128).tobytes()

    def test_layout(self, tmp_path):
        x = np.arange(2 * 3 * 2).reshape(2, 3, 2, order="F") + 0.5j
        save_tensor(tmp_path / "x.ctn3", x)
        raw = (tmp_path / "x.ctn3").read_bytes()
        assert raw[:4] == b"CTN3" and raw[4] == 1
        assert struct.unpack("<3Q", raw[5:29]) == (2, 3, 2)
        vals = np.frombuffer(raw[29:], "<f8")
        np.testing.assert_array_equal(vals[0::2], np.arange(12))
        np.testing.assert_array_equal(vals[1::2], 0.5)

    def test_truncated(self, rng, tmp_path):
        p = tmp_path / "x.ctn3"
        save_tensor(p, crandn(rng, 3, 3, 3))
        raw = p.read_bytes()
        for cut in (10, len(raw) - 8):
            p.write_bytes(raw[:cut])
            with pytest.raises(CorruptHeaderError):
                load_tensor(p)

    def test_version_bump(self, rng, tmp_path):
        p = tmp_path / "x.ctn3"
        save_tensor(p, crandn(rng, 2, 2, 2))
        raw = bytearray(p.read_bytes())
        raw[4] = 2
        p.write_bytes(bytes(raw))
        with pytest.raises(UnsupportedVersionError):
            load_tensor(p)

    def test_bad_magic(self, rng, tmp_path):
        p = tmp_path / "x.ctn3"
        save_tensor(p, crandn(rng, 2, 2, 2))
        p.write_bytes(b"XXXX" + p.read_bytes()[4:])
        with pytest.raises(CorruptHeaderError, match="magic"):
            load_tensor(p)

    def test_io_error_is_distinct(self, tmp_path):
        with pytest.raises(OSError):
            load_tensor(tmp_path / "missing.ctn3")
        assert not issubclass(TensorFileError, OSError)
