#ifndef HYPERGAME_HYPERGAME_HPP
#define HYPERGAME_HYPERGAME_HPP

#include "hypergame/closed_forms.hpp"
#include "hypergame/csv.hpp"
#include "hypergame/game.hpp"
#include "hypergame/introspection.hpp"
#include "hypergame/lattice.hpp"
#include "hypergame/parallel.hpp"
#include "hypergame/replicator.hpp"
#include "hypergame/rng.hpp"
#include "hypergame/tournament.hpp"

#endif  // HYPERGAME_HYPERGAME_HPP
