import pytest
from hypothesis import given
from hypothesis import strategies as st

from confstress import catalogs
from confstress.errors import CatalogError, ParseError
from confstress.ingest import parse_run_command, render_run_command
from confstress.ingest.types import RunOptions


class TestExamples:
    def test_escape_poc_line(self):
        opts = parse_run_command(
            "docker run --rm -it --cap-add=SYS_ADMIN "
            "--security-opt apparmor=unconfined ubuntu bash")
        assert opts.cap_add == ("SYS_ADMIN",)
        assert opts.apparmor == "unconfined"
        assert opts.image == "ubuntu"
        assert opts.command == ("bash",)
        assert not opts.privileged
        assert opts.warnings == ()

    def test_all_defaults(self):
        opts = parse_run_command("docker run ubuntu")
        assert opts == RunOptions(image="ubuntu")

    def test_cap_drop_all_cap_add(self):
        opts = parse_run_command(
            "docker run --cap-drop ALL --cap-add NET_BIND_SERVICE nginx")
        assert opts.cap_drop == ("ALL",)
        assert opts.cap_add == ("NET_BIND_SERVICE",)

    def test_prompt_characters_stripped(self):
        opts = parse_run_command("  $ docker run --privileged nginx")
        assert opts.privileged

    def test_user_volume_modes(self):
        opts = parse_run_command(
            "docker run --user 1000 -v /data:/srv:ro --network host --ipc host nginx")
        assert opts.user_override == "1000"
        assert opts.volumes == (("/data", "/srv", "ro"),)
        assert opts.network_mode == "host"
        assert opts.ipc_mode == "host"


class TestErrors:
    def test_missing_value_names_token_and_position(self):
        with pytest.raises(ParseError) as err:
            parse_run_command("docker run --cap-add")
        assert err.value.token == "--cap-add"
        assert err.value.position == 2

    def test_not_a_docker_run_line(self):
        with pytest.raises(ParseError):
            parse_run_command("podman run ubuntu")

    def test_unknown_capability(self):
        with pytest.raises(CatalogError):
            parse_run_command("docker run --cap-add=NOT_A_CAP ubuntu")

    def test_unknown_flags_warn_not_fail(self):
        opts = parse_run_command("docker run --frobnicate=yes ubuntu")
        assert opts.image == "ubuntu"
        assert any("--frobnicate" in w for w in opts.warnings)


caps = st.sampled_from(sorted(catalogs.capabilities()))
cap_list = st.one_of(
    st.just(()),
    st.just(("ALL",)),
    st.lists(caps, max_size=3, unique=True).map(tuple),
)
safe_name = st.text("abcdefgh", min_size=1, max_size=8)
path = st.text("abcdefgh", min_size=1, max_size=6).map(lambda s: "/" + s)
volume = st.one_of(
    st.tuples(path, path, st.sampled_from(["rw", "ro"])),
    st.tuples(st.just(""), path, st.just("rw")),  # anonymous volume
)

run_options = st.builds(
    RunOptions,
    privileged=st.booleans(),
    cap_add=cap_list,
    cap_drop=cap_list,
    apparmor=st.one_of(st.sampled_from(["default", "unconfined"]), safe_name),
    seccomp=st.one_of(st.sampled_from(["default", "unconfined"]), path),
    no_new_privileges=st.booleans(),
    user_override=st.one_of(st.none(), st.just("1000"), st.just("app")),
    read_only=st.booleans(),
    volumes=st.lists(volume, max_size=2).map(tuple),
    network_mode=st.sampled_from(["bridge", "host", "none"]),
    ipc_mode=st.sampled_from(["private", "host"]),
    pid_mode=st.sampled_from(["private", "host"]),
    devices=st.lists(path, max_size=2, unique=True).map(tuple),
    name=st.one_of(st.none(), safe_name),
    image=st.just("ubuntu"),
    command=st.lists(safe_name, max_size=2).map(tuple),
)


@given(run_options)
def test_round_trip(opts):
    """render -> parse is the identity on parse-reachable options."""
    assert parse_run_command(render_run_command(opts)) == opts
