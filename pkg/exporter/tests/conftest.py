import sys
from pathlib import Path

import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers
from transformers import GPT2Config, GPT2LMHeadModel, PreTrainedTokenizerFast

sys.path.insert(0, str(Path(__file__).parent))  # make tiny_corpus importable

from tiny_corpus import ANSWER, CONTEXT, QUERY, WORDS


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory):
    """A tiny word-level causal LM written to a local directory."""
    path = tmp_path_factory.mktemp("tinylm")

    vocab = {"<unk>": 0, "<pad>": 1}
    for w in WORDS:
        vocab[w] = len(vocab)
    tok = Tokenizer(models.WordLevel(vocab, unk_token="<unk>"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tok, unk_token="<unk>", pad_token="<pad>"
    )
    fast.save_pretrained(path)

    torch.manual_seed(0)
    config = GPT2Config(
        vocab_size=len(vocab),
        n_positions=64,
        n_embd=16,
        n_layer=2,
        n_head=2,
    )
    GPT2LMHeadModel(config).save_pretrained(path)
    return str(path)


@pytest.fixture(scope="session")
def texts(tmp_path_factory):
    d = tmp_path_factory.mktemp("texts")
    (d / "context.txt").write_text(CONTEXT)
    (d / "query.txt").write_text(QUERY)
    (d / "answer.txt").write_text(ANSWER)
    return d
