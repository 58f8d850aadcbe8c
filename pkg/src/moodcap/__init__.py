"""moodcap: soundscape-affect-aware synthetic audio caption generation.

Pipeline stages, each usable as a library or through the ``moodcap`` CLI:

1. extract 72-value acoustic summary vectors from WAV clips,
2. train / evaluate a PCA + epsilon-SVR valence/arousal regressor,
3. discretize (valence, arousal) into qualified circumplex emotions,
4. build temporally ordered sound-event lists from strong labels,
5. render prompt variants and drive a chat-completion endpoint,
6. assemble caption records and report corpus statistics.
"""

__version__ = "0.1.0"
