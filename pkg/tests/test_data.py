"""Synthetic dataset generation and the download path."""
import hashlib
import http.server
import threading

import numpy as np
import pytest

from transkit.audio import load_tensor
from transkit.data import (
    ChecksumError, DataError, ManifestError, NetworkError,
    click_track_document, download_dataset, generate_synthetic_dataset,
    n_feature_frames, random_music_document,
)
from transkit.decode import decode_piano_notes
from transkit.metrics import note_f1
from transkit.midi_io import read_midi


def test_random_document_is_decodable_by_construction():
    rng = np.random.default_rng(2)
    for _ in range(30):
        doc = random_music_document(rng)
        assert len(doc.all_notes()) >= 1
        for n in doc.all_notes():
            assert n.offset_s - n.onset_s >= 0.15


def test_click_track_document_layout():
    doc = click_track_document(120.0, 8, beats_per_bar=4)
    notes = doc.all_notes()
    assert len(notes) == 8
    assert notes[0].pitch == 48 and notes[1].pitch == 60
    assert notes[4].pitch == 48
    assert notes[1].onset_s == pytest.approx(0.5)


def test_generate_music_dataset_files_and_targets(tmp_path):
    out = generate_synthetic_dataset("music", 3, 5, tmp_path / "d")
    wavs = sorted(out.glob("*.wav"))
    assert len(wavs) == 3
    for w in wavs:
        mid = w.with_suffix(".mid")
        target = load_tensor(w.with_name(w.stem + "_target.ten"))
        assert target.shape[1:] == (352, 3)
        # the stored ideal target decodes back to the reference notes
        ref = read_midi(mid.read_bytes()).all_notes()
        got = decode_piano_notes(target)
        assert note_f1(ref, got, onset_tol_s=0.021).f1 == 1.0


def test_generation_is_deterministic_bytes(tmp_path):
    a = generate_synthetic_dataset("drum", 2, 9, tmp_path / "a")
    b = generate_synthetic_dataset("drum", 2, 9, tmp_path / "b")
    for fa in sorted(a.iterdir()):
        fb = b / fa.name
        assert fa.read_bytes() == fb.read_bytes()


def test_generation_seed_changes_content(tmp_path):
    a = generate_synthetic_dataset("music", 1, 1, tmp_path / "a")
    b = generate_synthetic_dataset("music", 1, 2, tmp_path / "b")
    assert (a / "clip_000.wav").read_bytes() != (b / "clip_000.wav").read_bytes()


def test_generate_all_tasks_produce_inputs(tmp_path):
    for task, pattern in [("vocal", "*.wav"), ("chord", "*.wav"),
                          ("beat", "*.mid")]:
        out = generate_synthetic_dataset(task, 1, 0, tmp_path / task)
        assert list(out.glob(pattern))
    with pytest.raises(DataError):
        generate_synthetic_dataset("juggling", 1, 0, tmp_path / "x")
    with pytest.raises(DataError):
        generate_synthetic_dataset("music", 0, 0, tmp_path / "y")


def test_n_feature_frames_matches_spectrogram_contract():
    assert n_feature_frames(8000, 16000, 0.020) == 25
    assert n_feature_frames(1, 16000, 0.020) == 1


# ---- download path, served from a local HTTP server ----

PAYLOAD = b"0123456789abcdef" * 64


class _Handler(http.server.BaseHTTPRequestHandler):
    def do_GET(self):
        body = PAYLOAD
        if "Range" in self.headers:
            start = int(self.headers["Range"].split("=")[1].rstrip("-"))
            body = body[start:]
            self.send_response(206)
        else:
            self.send_response(200)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *a):
        pass


@pytest.fixture()
def http_url():
    srv = http.server.HTTPServer(("127.0.0.1", 0), _Handler)
    t = threading.Thread(target=srv.serve_forever, daemon=True)
    t.start()
    yield f"http://127.0.0.1:{srv.server_port}/data.bin"
    srv.shutdown()


def _manifest(url, sha=None):
    return {"toy": {"url": url, "sha256": sha}}


def test_download_and_verify(tmp_path, http_url):
    sha = hashlib.sha256(PAYLOAD).hexdigest()
    p = download_dataset("toy", tmp_path, _manifest(http_url, sha))
    assert p.read_bytes() == PAYLOAD
    # idempotent second call, no re-download needed
    assert download_dataset("toy", tmp_path, _manifest(http_url, sha)) == p


def test_download_checksum_mismatch_quarantines(tmp_path, http_url):
    with pytest.raises(ChecksumError):
        download_dataset("toy", tmp_path, _manifest(http_url, "0" * 64))
    assert list(tmp_path.glob("*.quarantine"))
    assert not (tmp_path / "data.bin").exists()


def test_download_resumes_partial(tmp_path, http_url):
    (tmp_path / "data.bin.part").write_bytes(PAYLOAD[:100])
    sha = hashlib.sha256(PAYLOAD).hexdigest()
    p = download_dataset("toy", tmp_path, _manifest(http_url, sha))
    assert p.read_bytes() == PAYLOAD


def test_download_unknown_manifest(tmp_path):
    with pytest.raises(ManifestError):
        download_dataset("nope", tmp_path, {})


def test_download_network_error_keeps_partial(tmp_path):
    m = _manifest("http://127.0.0.1:1/gone.bin")
    with pytest.raises(NetworkError):
        download_dataset("toy", tmp_path, m)
