import json

import pytest

from confstress import catalogs
from confstress.errors import ParseError, ValidationError
from confstress.ingest import (
    default_seccomp_profile,
    docker_default_apparmor,
    parse_apparmor_profile,
    parse_seccomp_profile,
)


class TestSeccomp:
    def test_bundled_default_profile(self):
        profile = default_seccomp_profile()
        assert profile.default_action == "errno"
        assert len(profile.allowed_syscalls) == 319
        # the reference profile keeps the escape-relevant syscalls reachable
        assert {"mount", "unshare"} <= profile.allowed_syscalls

    def test_permissive_default_allows_everything(self):
        profile = parse_seccomp_profile({"defaultAction": "SCMP_ACT_ALLOW"})
        assert profile.effective_allowlist() == frozenset(catalogs.syscalls())
        assert len(profile.effective_allowlist()) == 364

    def test_singleton_allowlist(self):
        doc = {"defaultAction": "SCMP_ACT_ERRNO",
               "syscalls": [{"names": ["mount"], "action": "SCMP_ACT_ALLOW"}]}
        profile = parse_seccomp_profile(doc)
        assert profile.allowed_syscalls == {"mount"}
        assert profile.effective_allowlist() == {"mount"}

    def test_unknown_syscalls_listed(self):
        doc = {"defaultAction": "SCMP_ACT_ERRNO",
               "syscalls": [{"names": ["mount", "bogus1", "bogus2"],
                             "action": "SCMP_ACT_ALLOW"}]}
        with pytest.raises(ValidationError) as err:
            parse_seccomp_profile(doc)
        assert err.value.offenders == ["bogus1", "bogus2"]

    def test_missing_default_action(self):
        with pytest.raises(ValidationError):
            parse_seccomp_profile({"syscalls": []})

    def test_denied_set_and_json_string_input(self):
        doc = json.dumps({
            "defaultAction": "SCMP_ACT_ALLOW",
            "syscalls": [{"names": ["ptrace"], "action": "SCMP_ACT_ERRNO"}],
        })
        profile = parse_seccomp_profile(doc)
        assert "ptrace" in profile.denied_syscalls
        assert "ptrace" not in profile.effective_allowlist()


class TestHostDescriptor:
    def test_toml_key_value_form(self):
        from confstress.ingest import parse_host_descriptor

        host = parse_host_descriptor(
            'hostname = "vm-2"\n'
            "# the running stack\n"
            'kernel = "4.9"\n'
            'docker = "19.03.11"\n'
            'containerd = "1.3.4"\n'
            'runc = "1.0.0-rc10"\n')
        assert host.hostname == "vm-2"
        assert str(host.kernel_version) == "4.9"
        assert host.runc_version.rc == 10

    def test_unknown_key_rejected(self):
        from confstress.ingest import parse_host_descriptor

        with pytest.raises(ValidationError):
            parse_host_descriptor('{"kernel": "4.9", "docker": "20.10.14", '
                                  '"containerd": "1.5.11", "runc": "1.0.3", '
                                  '"surprise": true}')

    def test_missing_versions_rejected(self):
        from confstress.ingest import parse_host_descriptor

        with pytest.raises(ValidationError, match="runc_version"):
            parse_host_descriptor('{"kernel": "4.9", "docker": "20.10.14", '
                                  '"containerd": "1.5.11"}')


class TestAppArmor:
    def test_single_grant(self):
        profile = parse_apparmor_profile("profile p {\n capability sys_admin,\n}")
        assert profile.granted_capabilities == {"SYS_ADMIN"}
        assert not profile.denied_mounts

    def test_single_denial(self):
        profile = parse_apparmor_profile("profile p {\n deny mount,\n}")
        assert profile.denied_mounts
        assert profile.granted_capabilities == frozenset()

    def test_docker_default_grants_the_default_set(self):
        profile = docker_default_apparmor()
        assert profile.granted_capabilities == frozenset(catalogs.default_capabilities())
        assert len(profile.granted_capabilities) == 14
        assert profile.denied_mounts

    def test_unparseable_line_reports_line_number(self):
        text = "profile p {\n capability sys_admin,\n nonsense here\n}"
        with pytest.raises(ParseError) as err:
            parse_apparmor_profile(text)
        assert err.value.position == 3

    def test_deny_raw_network(self):
        profile = parse_apparmor_profile("profile p {\n deny network raw,\n}")
        assert profile.denied_raw_network

    def test_unclosed_block(self):
        with pytest.raises(ParseError):
            parse_apparmor_profile("profile p {\n capability chown,")
