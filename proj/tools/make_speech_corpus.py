#!/usr/bin/env python3
# Copyright 2026 The odct Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Synthesize a small clean-speech corpus with espeak-ng.

Writes 16 kHz mono 16-bit WAV files into <out>/train and <out>/test. The two
splits use disjoint sentence text and disjoint voice variants so the test
utterances are held out from dictionary training.

Requires numpy, scipy and the `espeakng-loader` wheel (bundles libespeak-ng).
"""

import argparse
import ctypes
import pathlib
import random
import sys
import wave

import numpy as np
from scipy.signal import resample_poly

SUBJECTS = [
    "the old man", "a young girl", "my brother", "the teacher", "our neighbor",
    "the small dog", "a tired pilot", "the busy doctor", "her cousin",
    "the farmer", "a quiet student", "the captain", "his mother", "the baker",
    "a clever fox", "the new nurse", "the singer", "a patient driver",
]
VERBS = [
    "carried", "painted", "found", "wanted", "opened", "measured", "bought",
    "cleaned", "watched", "followed", "repaired", "described", "hid",
    "borrowed", "shipped", "counted", "lifted", "pushed", "dropped", "tasted",
]
OBJECTS = [
    "a heavy wooden box", "the bright yellow kite", "seven silver coins",
    "the broken window", "a basket of ripe plums", "the long letter",
    "an empty glass jar", "the thick blue rope", "a map of the harbor",
    "the sharp kitchen knife", "twelve fresh eggs", "the leather jacket",
    "a stack of old papers", "the garden gate", "a cup of hot tea",
    "the shiny red bicycle", "a bag of warm bread", "the tall ladder",
]
TAILS = [
    "before the storm arrived", "near the station", "after a long day",
    "with great care", "in the early morning", "under the bridge",
    "while the children slept", "at the edge of the field",
    "without saying a word", "during the noisy parade", "across the street",
    "for the third time", "beside the frozen lake", "in a hurry",
    "when the bell rang", "behind the small shop", "on a cold evening",
]

TRAIN_VOICES = ["en-us+m1", "en-us+m3", "en-us+m5", "en-us+f1", "en-us+f3",
                "en+m2", "en+m4", "en+f2", "en+f4", "en-us+m7"]
TEST_VOICES = ["en-us+m2", "en-us+f2", "en+m1", "en+f5", "en-us+m4",
               "en+f1", "en-us+m6", "en-us+f4", "en+m3", "en-us+f5"]

ESPEAK_RATE, ESPEAK_PITCH, ESPEAK_RANGE = 1, 3, 4
AUDIO_OUTPUT_SYNCHRONOUS = 2
TARGET_RATE = 16000


class Synth:
    def __init__(self):
        import espeakng_loader
        self.lib = ctypes.CDLL(espeakng_loader.get_library_path())
        data = espeakng_loader.get_data_path().encode()
        self.rate = self.lib.espeak_Initialize(AUDIO_OUTPUT_SYNCHRONOUS, 0, data, 0)
        if self.rate <= 0:
            raise RuntimeError("espeak_Initialize failed")
        self._chunks = []
        cb_type = ctypes.CFUNCTYPE(ctypes.c_int, ctypes.POINTER(ctypes.c_short),
                                   ctypes.c_int, ctypes.c_void_p)
        self._cb = cb_type(self._collect)
        self.lib.espeak_SetSynthCallback(self._cb)

    def _collect(self, wav, n, _events):
        if n > 0:
            self._chunks.append(np.ctypeslib.as_array(wav, shape=(n,)).copy())
        return 0

    def say(self, text, voice, rate, pitch, pitch_range):
        if self.lib.espeak_SetVoiceByName(voice.encode()) != 0:
            raise RuntimeError(f"unknown voice {voice}")
        self.lib.espeak_SetParameter(ESPEAK_RATE, rate, 0)
        self.lib.espeak_SetParameter(ESPEAK_PITCH, pitch, 0)
        self.lib.espeak_SetParameter(ESPEAK_RANGE, pitch_range, 0)
        self._chunks = []
        raw = text.encode()
        self.lib.espeak_Synth(raw, len(raw) + 1, 0, 0, 0, 0, None, None)
        self.lib.espeak_Synchronize()
        x = np.concatenate(self._chunks).astype(np.float64) / 32768.0
        g = np.gcd(TARGET_RATE, self.rate)
        return resample_poly(x, TARGET_RATE // g, self.rate // g)


def sentence(rng):
    return (f"{rng.choice(SUBJECTS)} {rng.choice(VERBS)} {rng.choice(OBJECTS)} "
            f"{rng.choice(TAILS)}, and then {rng.choice(SUBJECTS)} "
            f"{rng.choice(VERBS)} {rng.choice(OBJECTS)}.")


def write_wav(path, x):
    pcm = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(TARGET_RATE)
        w.writeframes(pcm.tobytes())


def render(synth, rng, voices, count, out_dir, used):
    out_dir.mkdir(parents=True, exist_ok=True)
    total = 0.0
    for i in range(count):
        text = sentence(rng)
        while text in used:
            text = sentence(rng)
        used.add(text)
        voice = voices[i % len(voices)]
        x = synth.say(text, voice, rate=rng.randint(140, 190),
                      pitch=rng.randint(30, 70), pitch_range=rng.randint(40, 80))
        peak = np.max(np.abs(x))
        x *= rng.uniform(0.25, 0.7) / max(peak, 1e-9)
        write_wav(out_dir / f"utt{i:04d}.wav", x)
        total += len(x) / TARGET_RATE
    return total


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", type=pathlib.Path)
    ap.add_argument("--train", type=int, default=170)
    ap.add_argument("--test", type=int, default=10)
    ap.add_argument("--seed", type=int, default=20140504)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    synth = Synth()
    used = set()
    t_train = render(synth, rng, TRAIN_VOICES, args.train, args.out / "train", used)
    t_test = render(synth, rng, TEST_VOICES, args.test, args.out / "test", used)
    print(f"train: {args.train} files, {t_train / 60:.1f} min; "
          f"test: {args.test} files, {t_test:.1f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
