"""Flask JSON API for reducing words, translation lengths and the (FA) decision."""

from flask import Flask, jsonify, request

from autfa.automorphisms import parse_automorphism
from autfa.errors import AutfaError, ParseError
from autfa.fa_decision import decide, explain
from autfa.gog import Shape, free_product_as_gog, translation_length
from autfa.io import factor_classes_from_data, parse_factor_counts, parse_signature, shipped_groups
from autfa.words import cyclically_reduce, format_word, parse_word, syllable_length

app = Flask(__name__)


def _payload() -> dict:
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ParseError("request body must be a JSON object")
    return data


def _field(data: dict, name: str) -> str:
    if name not in data:
        raise ParseError(f"missing field '{name}'")
    return str(data[name])


@app.errorhandler(AutfaError)
def handle_error(e: AutfaError):
    """Library errors are client errors."""
    return jsonify({"error": str(e)}), 400


@app.route("/api/groups", methods=["GET"])
def list_groups():
    """Names of the shipped groups."""
    return jsonify({"groups": shipped_groups()})


@app.route("/api/reduce", methods=["POST"])
def reduce_word():
    """Normal form and cyclic reduction of a word."""
    data = _payload()
    sig = parse_signature(_field(data, "groups"))
    w = parse_word(_field(data, "word"), sig)
    c, h = cyclically_reduce(w)
    return jsonify({
        "reduced": format_word(w),
        "cyclic": format_word(c.word),
        "conjugator": format_word(h),
        "cyclic_length": syllable_length(c),
    })


@app.route("/api/translen", methods=["POST"])
def translen():
    """Translation length of a word on a chosen realisation."""
    data = _payload()
    sig = parse_signature(_field(data, "groups"))
    try:
        shape = Shape(data.get("shape", Shape.SINGLE_EDGE.value))
    except ValueError as e:
        raise ParseError(f"unknown shape {data.get('shape')!r}") from e
    realisation = free_product_as_gog(sig, shape, base=int(data.get("base", 0)))
    w = parse_word(_field(data, "word"), sig)
    return jsonify({
        "word": format_word(w),
        "shape": shape.value,
        "symbolic": realisation.expected_translation_length(w),
        "path": translation_length(realisation.embed(w)),
    })


@app.route("/api/act", methods=["POST"])
def act():
    """Apply an automorphism to a word."""
    data = _payload()
    sig = parse_signature(_field(data, "groups"))
    alpha = parse_automorphism(_field(data, "automorphism"), sig)
    image = alpha(parse_word(_field(data, "word"), sig))
    return jsonify({"automorphism": alpha.to_text(), "image": format_word(image)})


@app.route("/api/fa-check", methods=["POST"])
def fa_check():
    """Decide (FA) from ``{"factors": "C2:4,S3:1"}`` or a list of factor entries."""
    data = _payload()
    factors = data.get("factors")
    if isinstance(factors, str):
        classes = parse_factor_counts(factors)
    else:
        classes = factor_classes_from_data(factors)
    verdict = decide(classes)
    body = verdict.to_dict()
    body["explanation"] = explain(verdict)
    return jsonify(body)


if __name__ == "__main__":
    app.run(debug=True, port=5000)
