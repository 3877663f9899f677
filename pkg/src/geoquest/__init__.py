"""geoquest: a location-based quest game server.

Core pieces: geodesy primitives (geo), an entity-tracking middleware
(tracker), the quest/dialog/inventory game engine (engine), an XML game
definition pipeline (gamedef), a journaled HTTP service (service/api), and
a deterministic simulation harness (sim).
"""

__version__ = "0.1.0"
