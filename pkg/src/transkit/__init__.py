"""transkit: a desk-scale automatic music transcription workbench.

Six task pipelines (solo piano, multi-instrument, drums, vocal, chords,
beats) built from the same parts: feature extraction, toy trainable models,
activation decoders, MIR metrics, sonification, and a CLI.
"""

__version__ = "0.1.0"

from .types import (
    BeatAnnotation, ChordSegment, DrumEvent, MidiDocument, NoteEvent,
    NoteStream, TimeGrid,
)

__all__ = [
    "BeatAnnotation", "ChordSegment", "DrumEvent", "MidiDocument",
    "NoteEvent", "NoteStream", "TimeGrid", "__version__",
]
