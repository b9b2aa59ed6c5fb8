"""Round-trip a domain definition through its JSON file format.

External domains are described declaratively: agents and their action
alphabets, feature predicates with rendering phrases, the task-completion
subset, and the relevance map.  File-loaded predicates carry no code, so
concrete states for such domains embed explicit feature valuations
({"features": {...}}); the built-in grid domains evaluate predicates from
positions instead.
"""

import json
import tempfile
from pathlib import Path

from mapex import encode_agent_state, get_domain, load_domain_file, save_domain_file

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "sr3.json"
    save_domain_file(get_domain("sr3"), path)
    print(f"wrote {path.stat().st_size} bytes; top-level keys:")
    print(" ", ", ".join(json.loads(path.read_text())))

    domain = load_domain_file(path)
    print(f"\nreloaded domain {domain.id!r}: {domain.n_agents} agents, "
          f"{domain.schema.n_features} features")

    record = {"features": {
        "victim_detect": True, "victim_complete": False,
        "fire_detect": False, "fire_complete": False,
        "obstacle_detect": False, "obstacle_complete": False,
    }}
    bits = encode_agent_state(record, domain.schema)
    print(f"explicit-feature record encodes to bits {bits:06b}")
