from hypothesis import given, settings
from hypothesis import strategies as st

from properties import MODELS, check_instance, instance_bounds


@st.composite
def instances(draw):
    model = draw(st.sampled_from(MODELS))
    n_max, m_max = instance_bounds(model)
    return (
        model,
        draw(st.integers(1, n_max)),
        draw(st.integers(0, m_max)),
        draw(st.floats(0.2, 2.0)),
        draw(st.floats(0.0, 3.0)),
        draw(st.floats(0.0, 3.0)),
    )


@given(instances())
@settings(max_examples=60, deadline=None)
def test_invariants(inst):
    dev = check_instance(*inst)
    assert dev.norm < 1e-12
    assert dev.conserved < 1e-10
    assert dev.positivity <= 1e-12
    assert dev.group < 1e-10
    assert dev.taylor < 1e-9
