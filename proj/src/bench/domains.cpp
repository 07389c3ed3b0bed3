#include "castl/bench/domains.hpp"

#include "castl/error.hpp"
#include "castl/util/strings.hpp"

namespace castl::bench {

namespace {

constexpr std::string_view kHousechip = R"((define (domain housechip)
  (:requirements :strips :typing :negative-preconditions)
  (:types robot room key)
  (:predicates
    (at ?r - robot ?x - room)
    (visited ?r - robot ?x - room)
    (locked ?x - room)
    (key-in ?k - key ?x - room)
    (holding-key ?r - robot ?k - key)
    (opens ?k - key ?x - room)
    (connected ?a - room ?b - room))

  (:action move
    :parameters (?r - robot ?from - room ?to - room)
    :precondition (and (at ?r ?from) (connected ?from ?to) (not (locked ?to)))
    :effect (and (at ?r ?to) (visited ?r ?to) (not (at ?r ?from))))

  (:action pick-key
    :parameters (?r - robot ?k - key ?x - room)
    :precondition (and (at ?r ?x) (key-in ?k ?x))
    :effect (and (holding-key ?r ?k) (not (key-in ?k ?x))))

  (:action unlock
    :parameters (?r - robot ?k - key ?from - room ?to - room)
    :precondition (and (at ?r ?from) (connected ?from ?to) (holding-key ?r ?k) (opens ?k ?to) (locked ?to))
    :effect (not (locked ?to))))
)";

constexpr std::string_view kKitchen = R"((define (domain kitchen)
  (:requirements :strips :typing :negative-preconditions)
  (:types child bread content sandwich tray place)
  (:constants kitchen - place)
  (:predicates
    (at_kitchen_bread ?b - bread)
    (at_kitchen_content ?c - content)
    (at_kitchen_sandwich ?s - sandwich)
    (no_gluten_bread ?b - bread)
    (no_gluten_content ?c - content)
    (ontray ?s - sandwich ?t - tray)
    (no_gluten_sandwich ?s - sandwich)
    (allergic_gluten ?c - child)
    (not_allergic_gluten ?c - child)
    (served ?c - child)
    (waiting ?c - child ?p - place)
    (at ?t - tray ?p - place)
    (notexist ?s - sandwich))

  (:action make_sandwich_no_gluten
    :parameters (?s - sandwich ?b - bread ?c - content)
    :precondition (and (at_kitchen_bread ?b) (at_kitchen_content ?c) (no_gluten_bread ?b)
                       (no_gluten_content ?c) (notexist ?s))
    :effect (and (at_kitchen_sandwich ?s) (no_gluten_sandwich ?s)
                 (not (at_kitchen_bread ?b)) (not (at_kitchen_content ?c)) (not (notexist ?s))))

  (:action make_sandwich
    :parameters (?s - sandwich ?b - bread ?c - content)
    :precondition (and (at_kitchen_bread ?b) (at_kitchen_content ?c) (notexist ?s))
    :effect (and (at_kitchen_sandwich ?s)
                 (not (at_kitchen_bread ?b)) (not (at_kitchen_content ?c)) (not (notexist ?s))))

  (:action put_on_tray
    :parameters (?s - sandwich ?t - tray)
    :precondition (and (at_kitchen_sandwich ?s) (at ?t kitchen))
    :effect (and (ontray ?s ?t) (not (at_kitchen_sandwich ?s))))

  (:action serve_sandwich_no_gluten
    :parameters (?s - sandwich ?c - child ?t - tray ?p - place)
    :precondition (and (allergic_gluten ?c) (ontray ?s ?t) (waiting ?c ?p) (no_gluten_sandwich ?s) (at ?t ?p))
    :effect (and (served ?c) (not (ontray ?s ?t))))

  (:action serve_sandwich
    :parameters (?s - sandwich ?c - child ?t - tray ?p - place)
    :precondition (and (not_allergic_gluten ?c) (waiting ?c ?p) (ontray ?s ?t) (at ?t ?p))
    :effect (and (served ?c) (not (ontray ?s ?t))))

  (:action move_tray
    :parameters (?t - tray ?p1 - place ?p2 - place)
    :precondition (and (at ?t ?p1) (not (= ?p1 ?p2)))
    :effect (and (at ?t ?p2) (not (at ?t ?p1)))))
)";

constexpr std::string_view kBlocksworld = R"((define (domain blocksworld)
  (:requirements :strips :typing :negative-preconditions :equality)
  (:types block table)
  (:predicates
    (on ?a - block ?b - block)
    (on_table ?b - block ?t - table)
    (clear ?b - block)
    (holding ?b - block)
    (arm-empty))

  (:action pick-up
    :parameters (?b - block ?t - table)
    :precondition (and (clear ?b) (on_table ?b ?t) (arm-empty))
    :effect (and (holding ?b) (not (on_table ?b ?t)) (not (clear ?b)) (not (arm-empty))))

  (:action put-down
    :parameters (?b - block ?t - table)
    :precondition (holding ?b)
    :effect (and (on_table ?b ?t) (clear ?b) (arm-empty) (not (holding ?b))))

  (:action stack
    :parameters (?a - block ?b - block)
    :precondition (and (holding ?a) (clear ?b) (not (= ?a ?b)))
    :effect (and (on ?a ?b) (clear ?a) (arm-empty) (not (holding ?a)) (not (clear ?b))))

  (:action unstack
    :parameters (?a - block ?b - block)
    :precondition (and (on ?a ?b) (clear ?a) (arm-empty) (not (= ?a ?b)))
    :effect (and (holding ?a) (clear ?b) (not (on ?a ?b)) (not (clear ?a)) (not (arm-empty)))))
)";

constraints::PhraseBook make_hc() {
  constraints::PhraseBook p;
  p.predicates = {{"at", "{0} is in {1}"},
                  {"visited", "{0} has visited {1}"},
                  {"locked", "{0} is locked"},
                  {"key-in", "{0} lies in {1}"},
                  {"holding-key", "{0} holds {1}"},
                  {"opens", "{0} opens {1}"},
                  {"connected", "{0} connects to {1}"}};
  p.actions = {{"move", "move {0} from {1} to {2}"},
               {"pick-key", "let {0} pick up {1} in {2}"},
               {"unlock", "let {0} use {1} to unlock the door from {2} to {3}"}};
  return p;
}

constraints::PhraseBook make_kt() {
  constraints::PhraseBook p;
  p.predicates = {{"at_kitchen_bread", "{0} is in the kitchen"},
                  {"at_kitchen_content", "{0} is in the kitchen"},
                  {"at_kitchen_sandwich", "{0} is in the kitchen"},
                  {"no_gluten_bread", "{0} is gluten-free"},
                  {"no_gluten_content", "{0} is gluten-free"},
                  {"ontray", "{0} is on {1}"},
                  {"no_gluten_sandwich", "{0} is gluten-free"},
                  {"allergic_gluten", "{0} is allergic to gluten"},
                  {"not_allergic_gluten", "{0} is not allergic to gluten"},
                  {"served", "{0} has been served"},
                  {"waiting", "{0} waits at {1}"},
                  {"at", "{0} is at {1}"},
                  {"notexist", "{0} has not been made yet"}};
  p.actions = {{"make_sandwich_no_gluten", "make gluten-free sandwich {0} from {1} and {2}"},
               {"make_sandwich", "make sandwich {0} from {1} and {2}"},
               {"put_on_tray", "put {0} on {1}"},
               {"serve_sandwich_no_gluten", "serve gluten-free {0} to {1} from {2} at {3}"},
               {"serve_sandwich", "serve {0} to {1} from {2} at {3}"},
               {"move_tray", "move {0} from {1} to {2}"}};
  return p;
}

constraints::PhraseBook make_bw() {
  constraints::PhraseBook p;
  p.predicates = {{"on", "{0} is on {1}"},
                  {"on_table", "{0} is on {1}"},
                  {"clear", "{0} is clear"},
                  {"holding", "the robot holds {0}"},
                  {"arm-empty", "the robot's hand is empty"}};
  p.actions = {{"pick-up", "pick up {0} from {1}"},
               {"put-down", "put {0} down on {1}"},
               {"stack", "stack {0} on {1}"},
               {"unstack", "unstack {0} from {1}"}};
  return p;
}

}  // namespace

std::string to_string(Domain d) {
  switch (d) {
    case Domain::HC: return "hc";
    case Domain::KT: return "kt";
    case Domain::BW: return "bw";
  }
  return "?";
}

Domain parse_domain_name(std::string_view name) {
  const std::string n = util::to_lower(std::string(name));
  if (n == "hc" || n == "housechip") return Domain::HC;
  if (n == "kt" || n == "kitchen") return Domain::KT;
  if (n == "bw" || n == "blocksworld") return Domain::BW;
  throw ConfigError("unknown benchmark domain '" + std::string(name) + "' (expected hc, kt or bw)");
}

std::string_view domain_pddl(Domain d) {
  switch (d) {
    case Domain::HC: return kHousechip;
    case Domain::KT: return kKitchen;
    case Domain::BW: return kBlocksworld;
  }
  return {};
}

const constraints::PhraseBook& phrases(Domain d) {
  static const auto hc = make_hc();
  static const auto kt = make_kt();
  static const auto bw = make_bw();
  switch (d) {
    case Domain::HC: return hc;
    case Domain::KT: return kt;
    case Domain::BW: return bw;
  }
  return bw;
}

}  // namespace castl::bench
