// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_CQA_HPP
#define CQA_CQA_HPP

#include "cqa/cnf.hpp"
#include "cqa/constraints.hpp"
#include "cqa/csv.hpp"
#include "cqa/engine.hpp"
#include "cqa/errors.hpp"
#include "cqa/eval.hpp"
#include "cqa/hypergraph.hpp"
#include "cqa/model.hpp"
#include "cqa/oracle.hpp"
#include "cqa/query.hpp"
#include "cqa/query_parser.hpp"
#include "cqa/reductions.hpp"
#include "cqa/rewrite.hpp"
#include "cqa/term.hpp"
#include "cqa/value.hpp"

#endif  // CQA_CQA_HPP
