#ifndef DANKU_DANKU_HPP
#define DANKU_DANKU_HPP

#include <danku/chain.hpp>
#include <danku/commitments.hpp>
#include <danku/contract.hpp>
#include <danku/errors.hpp>
#include <danku/fixed_point.hpp>
#include <danku/fraction.hpp>
#include <danku/io.hpp>
#include <danku/keccak.hpp>
#include <danku/network.hpp>
#include <danku/partition.hpp>
#include <danku/report.hpp>
#include <danku/scenario.hpp>
#include <danku/word.hpp>

#endif  // DANKU_DANKU_HPP
