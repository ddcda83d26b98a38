#!/usr/bin/env python3
"""
模型检查点读写
"""

import numpy as np
import numpy.testing as npt
import pytest

from loralab.errors import FormatError
from loralab.models.zoo import build_interference_detector
from loralab.nn.checkpoint import deserialize, load_model, save_model, serialize
from loralab.nn.network import Network
from loralab.nn.trainer import predict


@pytest.fixture
def warmed():
    network = Network(build_interference_detector()).init(np.random.default_rng(4))
    network.warm_up(np.random.default_rng(5).standard_normal((16, 128, 1, 1)))
    network.trained = True
    return network


def test_round_trip(tmp_path, warmed):
    path = str(tmp_path / "intdet.lckp")
    save_model(warmed, path)
    restored = load_model(path)
    assert restored.spec == warmed.spec
    assert restored.trained
    for (_, name, a), (_, _, b) in zip(warmed.named_parameters(), restored.named_parameters()):
        npt.assert_array_equal(a, b, err_msg=name)
    for index, state in warmed.bn_states.items():
        npt.assert_array_equal(restored.bn_states[index].running_mean,
                               state.running_mean.astype(np.float32))
    x = np.random.default_rng(6).standard_normal((8, 128, 1, 1))
    npt.assert_allclose(predict(restored, x)[1], predict(warmed, x)[1], rtol=1e-4, atol=1e-6)


def test_untrained_network_keeps_empty_statistics():
    network = Network(build_interference_detector()).init(np.random.default_rng(0))
    restored = deserialize(serialize(network))
    assert not restored.trained
    assert not restored.has_statistics


def test_bad_magic(warmed):
    data = bytearray(serialize(warmed))
    data[:4] = b"XXXX"
    with pytest.raises(FormatError) as info:
        deserialize(bytes(data))
    assert info.value.offset == 0


def test_truncated(warmed):
    data = serialize(warmed)
    with pytest.raises(FormatError):
        deserialize(data[:-3])
    with pytest.raises(FormatError):
        deserialize(data[:6])


def test_trailing_bytes(warmed):
    with pytest.raises(FormatError):
        deserialize(serialize(warmed) + b"\x00")
