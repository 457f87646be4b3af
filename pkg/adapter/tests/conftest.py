import json

import pytest
import torch
from transformers import BertConfig, BertForSequenceClassification, BertTokenizer

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "int", "return", "if", "else", "while", "for", "void", "char",
    "foo", "bar", "baz", "qux", "main", "x", "y", "n", "count",
    "+", "-", "*", "/", "=", ";", "(", ")", "{", "}", "0", "1", "2",
]


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """A tiny 2-class BERT checkpoint with deterministic random-init weights."""
    root = tmp_path_factory.mktemp("checkpoint")
    (root / "vocab.txt").write_text("\n".join(VOCAB) + "\n")
    tokenizer = BertTokenizer(str(root / "vocab.txt"), do_lower_case=True)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=16,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=64,
        num_labels=2,
    )
    torch.manual_seed(0)
    model = BertForSequenceClassification(config)
    model.eval()
    tokenizer.save_pretrained(str(root))
    model.save_pretrained(str(root))
    return str(root)


@pytest.fixture(scope="session")
def dataset_20(tmp_path_factory):
    """20 single-snippet inputs with ids and binary labels."""
    path = tmp_path_factory.mktemp("data") / "inputs.ndjson"
    snippets = [
        "int foo = bar + baz ;",
        "return x + y ;",
        "if ( n ) { return 0 ; }",
        "while ( count ) { count = count - 1 ; }",
        "for ( x = 0 ; x ; x = x + 1 ) { }",
        "void main ( ) { return ; }",
        "char qux = 1 ;",
        "x = y * 2 ;",
        "n = n / 2 ;",
        "foo ( bar , baz ) ;",
    ]
    with path.open("w") as handle:
        for i in range(20):
            handle.write(json.dumps({
                "id": f"in{i:04d}",
                "text": snippets[i % len(snippets)],
                "label": i % 2,
            }) + "\n")
    return str(path)
