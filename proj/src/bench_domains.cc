#include "pgp/bench.h"

#include <stdexcept>

using namespace std;

namespace pgp::bench {
namespace {
struct Entry {
    string_view name;
    string_view domain;
    string_view fixture;
};

constexpr string_view kBakingDomain = R"(
(define (domain baking)
  (:requirements :strips :typing)
  (:types egg flour pan oven cake soap)
  (:predicates (egg-unused ?e - egg) (flour-unused ?f - flour)
               (egg-in ?e - egg ?p - pan) (flour-in ?f - flour ?p - pan)
               (pan-no-egg ?p - pan) (pan-no-flour ?p - pan)
               (batter-in ?p - pan) (pan-out ?p - pan) (pan-dirty ?p - pan)
               (pan-in-oven ?p - pan ?o - oven) (oven-free ?o - oven)
               (unbaked ?c - cake) (baked ?c - cake) (soap-unused ?s - soap))
  (:action putegginpan
    :parameters (?e - egg ?p - pan)
    :precondition (and (egg-unused ?e) (pan-no-egg ?p) (pan-out ?p))
    :effect (and (egg-in ?e ?p) (not (egg-unused ?e)) (not (pan-no-egg ?p))))
  (:action putflourinpan
    :parameters (?f - flour ?p - pan)
    :precondition (and (flour-unused ?f) (pan-no-flour ?p) (pan-out ?p))
    :effect (and (flour-in ?f ?p) (not (flour-unused ?f)) (not (pan-no-flour ?p))))
  (:action mix
    :parameters (?e - egg ?f - flour ?p - pan)
    :precondition (and (egg-in ?e ?p) (flour-in ?f ?p))
    :effect (and (batter-in ?p) (not (egg-in ?e ?p)) (not (flour-in ?f ?p))))
  (:action putpaninoven
    :parameters (?p - pan ?o - oven)
    :precondition (and (pan-out ?p) (oven-free ?o) (batter-in ?p))
    :effect (and (pan-in-oven ?p ?o) (not (pan-out ?p)) (not (oven-free ?o))))
  (:action bakecake
    :parameters (?o - oven ?p - pan ?c - cake)
    :precondition (and (pan-in-oven ?p ?o) (batter-in ?p) (unbaked ?c))
    :effect (and (baked ?c) (pan-dirty ?p) (not (batter-in ?p)) (not (unbaked ?c))))
  (:action removepanfromoven
    :parameters (?p - pan ?o - oven)
    :precondition (pan-in-oven ?p ?o)
    :effect (and (pan-out ?p) (oven-free ?o) (not (pan-in-oven ?p ?o))))
  (:action cleanpan
    :parameters (?p - pan ?s - soap)
    :precondition (and (pan-dirty ?p) (soap-unused ?s) (pan-out ?p))
    :effect (and (pan-no-egg ?p) (pan-no-flour ?p)
                 (not (pan-dirty ?p)) (not (soap-unused ?s)))))
)";

constexpr string_view kBakingFixture = R"(pointers: ze:egg zf:flour zp:pan zo:oven zc:cake zs:soap
0. putegginpan(ze,zp)
1. putflourinpan(zf,zp)
2. mix(ze,zf,zp)
3. putpaninoven(zp,zo)
4. bakecake(zo,zp,zc)
5. removepanfromoven(zp,zo)
6. cleanpan(zp,zs)
7. inc(zc)
8. inc(ze)
9. inc(zf)
10. inc(zs)
11. goto(0,!yz)
12. end
)";

constexpr string_view kCorridorDomain = R"(
(define (domain corridor)
  (:requirements :strips :typing)
  (:types location)
  (:predicates (at ?l - location) (goal-at ?l - location)
               (adjacent ?x - location ?y - location))
  (:action move
    :parameters (?from - location ?to - location)
    :precondition (and (at ?from) (adjacent ?from ?to))
    :effect (and (at ?to) (not (at ?from)))))
)";

constexpr string_view kCorridorFixture = R"(pointers: z1:location z2:location
0. inc(z1)
1. move(z2,z1)
2. inc(z1)
3. inc(z2)
4. goto(1,!yz)
5. move(z1,z2)
6. set(z1,z2)
7. dec(z2)
8. test(goal-at(z1))
9. goto(4,yz)
10. end
)";

constexpr string_view kGripperDomain = R"(
(define (domain gripper)
  (:requirements :strips :typing)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room) (at ?b - ball ?r - room)
               (free ?g - gripper) (carry ?b - ball ?g - gripper))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (at-robby ?from)
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g))))
  (:action drop
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g)))))
)";

constexpr string_view kGripperFixture = R"(pointers: zr1:room zr2:room zb:ball zg:gripper
0. pick(zb,zr1,zg)
1. inc(zr2)
2. move(zr1,zr2)
3. drop(zb,zr2,zg)
4. move(zr2,zr1)
5. inc(zb)
6. goto(0,!yz)
7. end
)";

constexpr string_view kIntrusionDomain = R"(
(define (domain intrusion)
  (:requirements :strips :typing)
  (:types host)
  (:predicates (recon-performed ?h - host) (information-gathered ?h - host)
               (broke-into ?h - host) (logs-cleaned ?h - host)
               (root-access ?h - host) (files-modified ?h - host)
               (vandalized ?h - host) (files-downloaded ?h - host)
               (data-stolen-from ?h - host))
  (:action recon
    :parameters (?h - host)
    :precondition (and)
    :effect (recon-performed ?h))
  (:action information-gathering
    :parameters (?h - host)
    :precondition (recon-performed ?h)
    :effect (information-gathered ?h))
  (:action break-into
    :parameters (?h - host)
    :precondition (recon-performed ?h)
    :effect (broke-into ?h))
  (:action clean
    :parameters (?h - host)
    :precondition (broke-into ?h)
    :effect (logs-cleaned ?h))
  (:action gain-root
    :parameters (?h - host)
    :precondition (and (broke-into ?h) (logs-cleaned ?h))
    :effect (root-access ?h))
  (:action modify-files
    :parameters (?h - host)
    :precondition (root-access ?h)
    :effect (files-modified ?h))
  (:action vandalize
    :parameters (?h - host)
    :precondition (and (files-modified ?h) (logs-cleaned ?h))
    :effect (vandalized ?h))
  (:action download-files
    :parameters (?h - host)
    :precondition (root-access ?h)
    :effect (files-downloaded ?h))
  (:action steal-data
    :parameters (?h - host)
    :precondition (files-downloaded ?h)
    :effect (data-stolen-from ?h)))
)";

constexpr string_view kIntrusionFixture = R"(pointers: zh:host
0. recon(zh)
1. break-into(zh)
2. clean(zh)
3. gain-root(zh)
4. download-files(zh)
5. steal-data(zh)
6. inc(zh)
7. goto(0,!yz)
8. end
)";

constexpr string_view kLockDomain = R"(
(define (domain lock)
  (:requirements :strips :typing)
  (:types location)
  (:predicates (lock-at ?x - location) (key-at ?x - location)
               (agent-at ?x - location) (agent-has-key) (unlocked)
               (adjacent ?x - location ?y - location))
  (:action move
    :parameters (?x1 - location ?x2 - location)
    :precondition (and (agent-at ?x1) (adjacent ?x1 ?x2))
    :effect (and (agent-at ?x2) (not (agent-at ?x1))))
  (:action pickup
    :parameters (?x - location)
    :precondition (and (agent-at ?x) (key-at ?x))
    :effect (and (agent-has-key) (not (key-at ?x))))
  (:action drop
    :parameters (?x - location)
    :precondition (and (agent-at ?x) (agent-has-key))
    :effect (and (key-at ?x) (not (agent-has-key))))
  (:action open
    :parameters (?x - location)
    :precondition (and (agent-at ?x) (lock-at ?x) (agent-has-key))
    :effect (unlocked)))
)";

// The walk-back block decrements z2 before moving so that both pointers
// never index the same cell on a move.
constexpr string_view kLockFixture = R"(pointers: z1:location z2:location
0. inc(z1)
1. move(z2,z1)
2. inc(z1)
3. inc(z2)
4. goto(1,!yz)
5. pickup(z1)
6. dec(z2)
7. move(z1,z2)
8. dec(z1)
9. goto(5,!yz)
10. open(z1)
11. end
)";

constexpr string_view kOntableDomain = R"(
(define (domain ontable)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block) (ontable ?x - block)
               (clear ?x - block) (handempty) (holding ?x - block))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x - block)
    :precondition (holding ?x)
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y)
                 (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
)";

constexpr string_view kOntableFixture = R"(pointers: zo1:block zo2:block zo3:block
0. unstack(zo1,zo2)
1. inc(zo2)
2. goto(0,!yz)
3. put-down(zo1)
4. clear(zo2)
5. inc(zo1)
6. goto(0,!yz)
7. clear(zo1)
8. inc(zo3)
9. goto(0,!yz)
10. end
)";

constexpr string_view kSpannerDomain = R"(
(define (domain spanner)
  (:requirements :strips :typing)
  (:types location locatable - object
          man nut spanner - locatable)
  (:predicates (at ?m - locatable ?l - location) (carrying ?m - man ?s - spanner)
               (useable ?s - spanner) (link ?l1 - location ?l2 - location)
               (tightened ?n - nut) (loose ?n - nut))
  (:action walk
    :parameters (?start - location ?end - location ?m - man)
    :precondition (and (at ?m ?start) (link ?start ?end))
    :effect (and (at ?m ?end) (not (at ?m ?start))))
  (:action pickup_spanner
    :parameters (?l - location ?s - spanner ?m - man)
    :precondition (and (at ?m ?l) (at ?s ?l))
    :effect (and (carrying ?m ?s) (not (at ?s ?l))))
  (:action tighten_nut
    :parameters (?l - location ?s - spanner ?m - man ?n - nut)
    :precondition (and (at ?m ?l) (at ?n ?l) (carrying ?m ?s) (useable ?s) (loose ?n))
    :effect (and (tightened ?n) (not (loose ?n)) (not (useable ?s)))))
)";

// zl2 trails zl1 by one location, so line 9 advances zl2.
constexpr string_view kSpannerFixture = R"(pointers: zl1:location zl2:location zs:spanner zn:nut zm:man
0. pickup_spanner(zl1,zs,zm)
1. tighten_nut(zl1,zs,zm,zn)
2. inc(zn)
3. inc(zs)
4. goto(0,!yz)
5. inc(zl1)
6. walk(zl2,zl1,zm)
7. clear(zn)
8. clear(zs)
9. inc(zl2)
10. goto(0,!yz)
11. end
)";

constexpr string_view kVisitallDomain = R"(
(define (domain visitall)
  (:requirements :strips :typing)
  (:types row col)
  (:predicates (visited ?r - row ?c - col))
  (:action visit
    :parameters (?r - row ?c - col)
    :precondition (and)
    :effect (visited ?r ?c)))
)";

constexpr string_view kVisitallFixture = R"(pointers: zi:row zj:col
0. visit(zi,zj)
1. inc(zi)
2. goto(0,!yz)
3. clear(zi)
4. inc(zj)
5. goto(0,!yz)
6. end
)";

constexpr Entry kEntries[] = {
    {"baking", kBakingDomain, kBakingFixture},
    {"corridor", kCorridorDomain, kCorridorFixture},
    {"gripper", kGripperDomain, kGripperFixture},
    {"intrusion", kIntrusionDomain, kIntrusionFixture},
    {"lock", kLockDomain, kLockFixture},
    {"ontable", kOntableDomain, kOntableFixture},
    {"spanner", kSpannerDomain, kSpannerFixture},
    {"visitall", kVisitallDomain, kVisitallFixture},
};

const Entry &entry(string_view name) {
    for (const Entry &e : kEntries)
        if (e.name == name)
            return e;
    throw invalid_argument("unknown benchmark domain '" + string(name) + "'");
}
}

string_view domain_text(string_view name) {
    return entry(name).domain;
}

string_view fixture_text(string_view name) {
    return entry(name).fixture;
}
}
