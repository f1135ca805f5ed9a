#pragma once

#include <copro/error.hpp>
#include <copro/label.hpp>
#include <copro/finset.hpp>
#include <copro/monad.hpp>
#include <copro/complement.hpp>
#include <copro/chain.hpp>
#include <copro/bialgebra.hpp>
#include <copro/coproduct.hpp>
#include <copro/layered.hpp>
#include <copro/free_monad.hpp>
#include <copro/trnkova.hpp>
#include <copro/advisor.hpp>
