#pragma once

#include "symlind/error.hpp"
#include "symlind/liouville.hpp"
#include "symlind/sym_basis.hpp"
#include "symlind/collective.hpp"
#include "symlind/expmv.hpp"
#include "symlind/evolution.hpp"
#include "symlind/lambda.hpp"
#include "symlind/oracle.hpp"
#include "symlind/appendix.hpp"
#include "symlind/io.hpp"
#include "symlind/validation.hpp"
#include "symlind/cli.hpp"
