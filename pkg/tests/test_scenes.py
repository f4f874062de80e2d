import numpy as np

from edgediff.scenes import SCENES, make_scenes


def test_scenes_are_hdr_and_deterministic():
    a = make_scenes(48)
    b = make_scenes(48)
    assert set(a) == set(SCENES)
    for name, img in a.items():
        assert img.data.shape == (48, 48, 3)
        assert img.data.tobytes() == b[name].data.tobytes()
        Y = img.absolute()[..., 1]
        assert Y.min() > 0
        assert np.log10(Y.max() / Y.min()) > 3
