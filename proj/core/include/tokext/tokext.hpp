#pragma once

#include "tokext/csv.hpp"
#include "tokext/error.hpp"
#include "tokext/extension.hpp"
#include "tokext/io.hpp"
#include "tokext/lm.hpp"
#include "tokext/metrics.hpp"
#include "tokext/ntp.hpp"
#include "tokext/report.hpp"
#include "tokext/tokenizer.hpp"
#include "tokext/tokenizer_io.hpp"
#include "tokext/trainer.hpp"
#include "tokext/utf8.hpp"
