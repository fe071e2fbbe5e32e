"""Game model: parsing, round trips, validation verdicts, experiences."""

import json
import random
from dataclasses import replace
from fractions import Fraction as F

import pytest

from randgen import random_game
from timeability.augmented import guessing_game
from timeability.game import (CHANCE, DECISION, LEAF, ChildEdge, Game,
                              GameFormatError, Node, content_digest,
                              experience, game_to_document, parse_game,
                              serialize_game, validate)

SINGLE_LEAF_DOC = """
{
  "players": ["1", "2"],
  "root": 0,
  "nodes": [{"id": 0, "kind": "leaf", "payoffs": ["0", "0"]}]
}
"""

FIG1B_DOC = """
{
  "players": ["1", "2"],
  "root": 0,
  "nodes": [
    {"id": 0, "kind": "chance",
     "children": [{"node": 1, "action": "H", "prob": "1/2"},
                  {"node": 2, "action": "T", "prob": "1/2"}]},
    {"id": 1, "kind": "decision", "player": 1, "infoset": "P1",
     "children": [{"node": 3, "action": "first"},
                  {"node": 4, "action": "second"}]},
    {"id": 2, "kind": "decision", "player": 2, "infoset": "P2",
     "children": [{"node": 5, "action": "first"},
                  {"node": 6, "action": "second"}]},
    {"id": 3, "kind": "decision", "player": 2, "infoset": "P2",
     "children": [{"node": 7, "action": "first"},
                  {"node": 8, "action": "second"}]},
    {"id": 4, "kind": "decision", "player": 2, "infoset": "P2",
     "children": [{"node": 9, "action": "first"},
                  {"node": 10, "action": "second"}]},
    {"id": 5, "kind": "leaf", "payoffs": ["0", "1"]},
    {"id": 6, "kind": "leaf", "payoffs": ["0", "0"]},
    {"id": 7, "kind": "leaf", "payoffs": ["1", "0"]},
    {"id": 8, "kind": "leaf", "payoffs": ["1", "1"]},
    {"id": 9, "kind": "leaf", "payoffs": ["0", "0"]},
    {"id": 10, "kind": "leaf", "payoffs": ["0", "1"]}
  ]
}
"""


class TestParse:
    def test_fig1b_shape(self):
        g = parse_game(FIG1B_DOC)
        kinds = [g.nodes[v].kind for v in sorted(g.nodes)]
        assert kinds.count(CHANCE) == 1
        assert kinds.count(DECISION) == 4
        assert kinds.count(LEAF) == 6

    def test_single_leaf(self):
        g = parse_game(SINGLE_LEAF_DOC)
        assert len(g.nodes) == 1
        assert g.nodes[0].payoffs == (F(0), F(0))

    def test_bad_probability_sum_names_the_sum(self):
        doc = json.loads(FIG1B_DOC)
        doc["nodes"][0]["children"][1]["prob"] = "1/3"
        with pytest.raises(GameFormatError, match="sum to 5/6"):
            parse_game(json.dumps(doc))

    def test_syntax_error_carries_position(self):
        with pytest.raises(GameFormatError, match="line"):
            parse_game("{ not json")

    def test_float_probability_rejected(self):
        doc = json.loads(FIG1B_DOC)
        doc["nodes"][0]["children"][0]["prob"] = 0.5
        doc["nodes"][0]["children"][1]["prob"] = 0.5
        with pytest.raises(GameFormatError, match="float"):
            parse_game(json.dumps(doc))

    def test_implicit_singleton_infoset(self):
        doc = json.loads(FIG1B_DOC)
        del doc["nodes"][1]["infoset"]
        g = parse_game(json.dumps(doc))
        assert g.nodes[1].infoset == "~1"

    def test_round_trip_is_identity(self):
        g = parse_game(FIG1B_DOC)
        text = serialize_game(g)
        again = parse_game(text)
        assert serialize_game(again) == text
        assert game_to_document(again) == game_to_document(g)

    def test_decimal_payoffs_parse_exactly(self):
        doc = json.loads(SINGLE_LEAF_DOC)
        doc["nodes"][0]["payoffs"] = ["0.25", "3/4"]
        g = parse_game(json.dumps(doc))
        assert g.nodes[0].payoffs == (F(1, 4), F(3, 4))


class TestValidate:
    def test_fig1a_report(self, fig1a):
        report = validate(fig1a)
        assert report.structurally_valid
        assert report.perfect_recall
        assert report.max_own_nodes == {1: 1, 2: 1}
        assert report.payoffs_in_unit_interval

    def test_guessing_game_m(self):
        report = validate(guessing_game(2, 2))
        assert report.perfect_recall
        assert report.max_own_nodes == {1: 2}

    def test_recall_violation_detected(self, fig1a):
        # merge a first-round and a second-round node of player 1
        nodes = dict(fig1a.nodes)
        nodes[5] = replace(nodes[5], infoset="P1x")
        nodes[1] = replace(nodes[1], infoset="P1x")
        g = Game(players=fig1a.players, nodes=nodes, root=0)
        report = validate(g)
        assert report.structurally_valid
        assert not report.perfect_recall

    @pytest.mark.parametrize("corrupt, field", [
        ("orphan", "tree_ok"),
        ("probability", "chance_ok"),
        ("owner", "infosets_ok"),
        ("labels", "infosets_ok"),
        ("payoff_len", "payoffs_ok"),
        ("leaf_children", "kinds_ok"),
    ])
    def test_single_field_corruptions_are_flagged(self, fig1a, corrupt, field):
        nodes = dict(fig1a.nodes)
        if corrupt == "orphan":
            nodes[99] = Node(node_id=99, kind=LEAF, payoffs=(F(0), F(0)))
        elif corrupt == "probability":
            root = nodes[0]
            nodes[0] = replace(root, children=(
                replace(root.children[0], prob=F(1, 3)), root.children[1]))
        elif corrupt == "owner":
            nodes[3] = replace(nodes[3], player=1)
        elif corrupt == "labels":
            node = nodes[3]
            nodes[3] = replace(node, children=(
                replace(node.children[0], action="zzz"), node.children[1]))
        elif corrupt == "payoff_len":
            nodes[7] = replace(nodes[7], payoffs=(F(1),))
        elif corrupt == "leaf_children":
            nodes[7] = replace(nodes[7], children=nodes[3].children)
        g = Game(players=fig1a.players, nodes=nodes, root=0)
        report = validate(g)
        assert not getattr(report, field)
        assert not report.structurally_valid
        assert report.problems


class TestExperience:
    def test_root_is_empty(self, fig1a):
        assert experience(fig1a, 0, 1) == ()
        assert experience(fig1a, 0, 2) == ()

    def test_fig1a_left_player2_node(self, fig1a):
        # player 2 has no own nodes above the left second-mover nodes
        assert experience(fig1a, 3, 2) == ()
        # while player 1 acted once on the way there
        assert experience(fig1a, 3, 1) == (("P1", 0),)

    def test_guessing_round2(self):
        g = guessing_game(2, 2)
        round2 = [v for v, node in g.nodes.items()
                  if node.kind == DECISION and node.infoset.startswith("r2")]
        v = round2[0]
        exp = experience(g, v, 1)
        assert len(exp) == 1
        infoset, action = exp[0]
        assert infoset == "r1"
        pass_index = [e.action for e in
                      g.nodes[g.infosets["r1"][0]].children].index("pass")
        assert action == pass_index

    def test_unknown_node(self, fig1a):
        with pytest.raises(KeyError):
            experience(fig1a, 777, 1)

    def test_infoset_members_share_experience_on_recall_corpus(self):
        rng = random.Random(4)
        for _ in range(25):
            g = random_game(rng, merge="recall")
            assert validate(g).perfect_recall
            for members in g.infosets.values():
                p = g.nodes[members[0]].player
                exps = {experience(g, v, p) for v in members}
                assert len(exps) == 1


def test_serialization_round_trip_on_random_corpus():
    rng = random.Random(11)
    for _ in range(20):
        g = random_game(rng, merge="recall")
        text = serialize_game(g)
        again = parse_game(text)
        assert serialize_game(again) == text
        assert content_digest(again) == content_digest(g)
