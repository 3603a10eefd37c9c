"""Position checker: store semantics, alarms, and the wire API."""

import json

import httpx
import pytest

from honeyauth.errors import (
    HoneycheckerUnavailableError,
    UnknownUserError,
    ValidationError,
)
from honeyauth.honeychecker import (
    AlarmSignal,
    CheckerServer,
    Honeychecker,
    HttpCheckerClient,
    InMemoryAlarmSink,
)
from honeyauth.storage import JsonFileStore


@pytest.fixture()
def sink():
    return InMemoryAlarmSink()


@pytest.fixture()
def checker(tmp_path, sink):
    store = JsonFileStore(tmp_path / "checker.json")
    return Honeychecker(store, max_slots=3, alarm_sink=sink)


class TestCoreSemantics:
    def test_set_then_check_true(self, checker, sink):
        checker.set_index("alice", 2)
        assert checker.check("alice", 2) is True
        assert sink.signals == []

    def test_wrong_slot_false_with_one_alarm(self, checker, sink):
        checker.set_index("alice", 2)
        assert checker.check("alice", 1) is False
        assert len(sink.signals) == 1
        signal = sink.signals[0]
        assert isinstance(signal, AlarmSignal)
        assert signal.username == "alice"
        assert signal.observed_slot == 1

    def test_every_false_check_alarms_exactly_once(self, checker, sink):
        checker.set_index("alice", 2)
        for _ in range(4):
            checker.check("alice", 3)
        checker.check("alice", 2)
        assert len(sink.signals) == 4

    def test_unknown_user_is_lookup_error_not_false(self, checker, sink):
        with pytest.raises(UnknownUserError):
            checker.check("ghost", 1)
        assert sink.signals == []

    def test_index_range_validation(self, checker):
        with pytest.raises(ValidationError):
            checker.set_index("alice", 0)
        with pytest.raises(ValidationError):
            checker.set_index("alice", 4)
        with pytest.raises(ValidationError):
            checker.set_index("", 1)

    def test_upsert_latest_wins(self, checker):
        checker.set_index("alice", 2)
        checker.set_index("alice", 3)
        assert checker.check("alice", 3) is True

    def test_delete_idempotent_and_reregistration(self, checker):
        checker.set_index("alice", 1)
        checker.delete_index("alice")
        checker.delete_index("alice")
        with pytest.raises(UnknownUserError):
            checker.check("alice", 1)
        checker.set_index("alice", 1)
        assert checker.check("alice", 1) is True

    def test_check_is_read_only(self, checker, tmp_path):
        checker.set_index("alice", 2)
        before = (tmp_path / "checker.json").read_text()
        checker.check("alice", 1)
        checker.check("alice", 2)
        assert (tmp_path / "checker.json").read_text() == before


class TestSeparationInvariant:
    def test_store_holds_only_usernames_indexes_timestamps(self, checker, tmp_path):
        checker.set_index("alice", 2)
        checker.set_index("bob", 1)
        data = json.loads((tmp_path / "checker.json").read_text())
        assert set(data) == {"schema_version", "users"}
        for record in data["users"].values():
            assert set(record) == {"sweet_index", "updated_at"}

    def test_store_survives_reload(self, tmp_path, sink):
        store = JsonFileStore(tmp_path / "checker.json")
        Honeychecker(store, alarm_sink=sink).set_index("alice", 2)
        reloaded = Honeychecker(JsonFileStore(tmp_path / "checker.json"), alarm_sink=sink)
        assert reloaded.check("alice", 2) is True


class TestWireApi:
    @pytest.fixture()
    def server(self, checker):
        srv = CheckerServer(checker, shared_secret="s3cret")
        srv.start_background()
        yield srv
        srv.shutdown()

    @pytest.fixture()
    def client(self, server):
        cl = HttpCheckerClient(server.url, shared_secret="s3cret")
        yield cl
        cl.close()

    def test_round_trip(self, client, sink):
        client.set_index("alice", 2)
        assert client.check("alice", 2) is True
        assert client.check("alice", 1) is False
        assert len(sink.signals) == 1
        client.delete_index("alice")
        with pytest.raises(UnknownUserError):
            client.check("alice", 2)

    def test_health(self, client):
        assert client.health() is True

    def test_bad_shared_secret_rejected(self, server):
        bad = HttpCheckerClient(server.url, shared_secret="wrong")
        with pytest.raises(HoneycheckerUnavailableError):
            bad.set_index("alice", 1)
        bad.close()
        raw = httpx.post(f"{server.url}/set", json={"username": "a", "index": 1})
        assert raw.status_code == 401

    def test_validation_maps_to_422(self, server):
        response = httpx.post(
            f"{server.url}/set",
            json={"username": "alice", "index": 9},
            headers={"x-checker-token": "s3cret"},
        )
        assert response.status_code == 422

    def test_malformed_body_maps_to_400(self, server):
        response = httpx.post(
            f"{server.url}/check",
            content=b"not json",
            headers={"x-checker-token": "s3cret", "content-type": "application/json"},
        )
        assert response.status_code == 400

    def test_unreachable_checker_surfaces_unavailable(self):
        client = HttpCheckerClient("http://127.0.0.1:9", shared_secret="x", timeout=0.3)
        with pytest.raises(HoneycheckerUnavailableError):
            client.check("alice", 1)
        client.close()


class TestWebhookSink:
    def test_alarm_posted_as_json(self, tmp_path):
        import json as json_mod
        import threading
        from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

        from honeyauth.honeychecker import WebhookAlarmSink

        received = []

        class Hook(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                received.append(json_mod.loads(self.rfile.read(length)))
                self.send_response(200)
                self.end_headers()

            def log_message(self, *args):
                pass

        httpd = ThreadingHTTPServer(("127.0.0.1", 0), Hook)
        threading.Thread(target=httpd.serve_forever, daemon=True).start()
        try:
            url = f"http://127.0.0.1:{httpd.server_address[1]}/alarm"
            store = JsonFileStore(tmp_path / "checker.json")
            checker = Honeychecker(store, alarm_sink=WebhookAlarmSink(url))
            checker.set_index("alice", 2)
            checker.check("alice", 1)
        finally:
            httpd.shutdown()
            httpd.server_close()
        assert len(received) == 1
        assert received[0]["username"] == "alice"
        assert received[0]["observed_slot"] == 1

    def test_webhook_failure_is_swallowed(self, tmp_path):
        from honeyauth.honeychecker import WebhookAlarmSink

        store = JsonFileStore(tmp_path / "checker.json")
        checker = Honeychecker(
            store, alarm_sink=WebhookAlarmSink("http://127.0.0.1:9/alarm", timeout=0.2)
        )
        checker.set_index("alice", 2)
        assert checker.check("alice", 1) is False  # no exception
