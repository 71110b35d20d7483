#pragma once

#include "spintensor/error.hpp"
#include "spintensor/number.hpp"
#include "spintensor/polynomial.hpp"
#include "spintensor/coefficient.hpp"
#include "spintensor/tensor_ir.hpp"
#include "spintensor/canonicalizer.hpp"
#include "spintensor/brute_equiv.hpp"
#include "spintensor/calculus.hpp"
#include "spintensor/printer.hpp"
#include "spintensor/parser.hpp"
#include "spintensor/lambda.hpp"
#include "spintensor/oracle.hpp"
#include "spintensor/script.hpp"
#include "spintensor/derivation.hpp"
#include "spintensor/suite.hpp"
#include "spintensor/report_json.hpp"
