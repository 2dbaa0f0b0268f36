#ifndef CIRQUE_CIRQUE_HPP
#define CIRQUE_CIRQUE_HPP

#include "cirque/bounds.hpp"
#include "cirque/controller.hpp"
#include "cirque/engine.hpp"
#include "cirque/errors.hpp"
#include "cirque/expr.hpp"
#include "cirque/oracle.hpp"
#include "cirque/problem.hpp"
#include "cirque/rules.hpp"

#endif  // CIRQUE_CIRQUE_HPP
