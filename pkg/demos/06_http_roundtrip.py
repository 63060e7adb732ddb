"""The full client loop over HTTP: case out, vote in, answer back.

Boots the API on a local port, fetches a disguised case, files a
proposal and a confirmation as two players would, then asks the question
that only the crowd-supplied fact can answer.  Run it directly; it cleans
up after itself.
"""

import tempfile
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from gamekg import export_jsonl, ingest_documents
from gamekg.config import ServerConfig
from gamekg.graph import Document
from gamekg.server import create_app, load_state

PRESS_RELEASE = Document(
    id="press-release",
    title="Trafficking case press release",
    body=(
        "Kizer transported victims across state borders. "
        "Villaman was an accomplice to Kizer. "
        "The press release states Kizer broke the Mann Act when he "
        "transported a victim across state borders."
    ),
)

PORT = 8641


def main() -> None:
    with tempfile.TemporaryDirectory() as workdir:
        export_jsonl(ingest_documents([PRESS_RELEASE]), Path(workdir) / "kg.jsonl")
        config = ServerConfig(
            data_dir=Path(workdir),
            listen=f"127.0.0.1:{PORT}",
            seed=11,
            tau_low=0.0,
            tau_high=0.1,  # wide-open band so the tiny graph yields hints
            operator_token="demo-operator",
        )
        state = load_state(config)
        server = uvicorn.Server(
            uvicorn.Config(create_app(state), host="127.0.0.1", port=PORT, log_level="error")
        )
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()

        base = f"http://127.0.0.1:{PORT}/api/v1"
        with httpx.Client() as client:
            for _ in range(50):
                try:
                    client.get(f"{base}/health")
                    break
                except httpx.TransportError:
                    time.sleep(0.1)

            case = client.get(f"{base}/case/next").json()
            print(f"case {case['case_id']}")
            print(f"  narrative: {case['narrative']}")
            print(f"  entities:  {[e['pseudonym'] for e in case['entities']]}")
            print(f"  hints:     {len(case['hints'])}")

            # The demo peeks server-side to aim the vote at the right pair;
            # real players just drag two pseudonymised nodes together.
            registered = state.registry.get(case["case_id"])
            vote = {
                "case_id": case["case_id"],
                "action": "propose",
                "subject_token": registered.token_for("villaman"),
                "predicate": "violated",
                "object_token": registered.token_for("mann-act"),
            }
            first = client.post(
                f"{base}/feedback",
                json={**vote, "event_id": "demo-1", "player_id": "alice"},
            ).json()
            print(f"\nalice proposes: weight={first['edge_weight']} status={first['status']}")

            second = client.post(
                f"{base}/feedback",
                json={**vote, "action": "confirm", "event_id": "demo-2", "player_id": "bob"},
            ).json()
            print(f"bob confirms:   weight={second['edge_weight']} status={second['status']}")

            qa = client.post(
                f"{base}/qa", json={"question": "What act did Villaman break?"}
            ).json()
            print(f"\nQ&A after consensus: {qa['answer']}")

            ndjson = client.get(
                f"{base}/kg",
                params={"view": "full"},
                headers={"Authorization": "Bearer demo-operator"},
            ).text
            print(f"operator export: {len(ndjson.splitlines())} records")

        server.should_exit = True
        thread.join(timeout=5)


if __name__ == "__main__":
    main()
