#pragma once

#include "pnpair/errors.hpp"
#include "pnpair/numtheory.hpp"
#include "pnpair/base_field.hpp"
#include "pnpair/poly.hpp"
#include "pnpair/ext_field.hpp"
#include "pnpair/cyclotomic.hpp"
#include "pnpair/ratfunc.hpp"
#include "pnpair/criteria.hpp"
#include "pnpair/small_field.hpp"
#include "pnpair/oracle.hpp"
#include "pnpair/pipeline.hpp"
