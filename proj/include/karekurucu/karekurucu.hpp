#pragma once

#include "karekurucu/error.hpp"
#include "karekurucu/textnorm.hpp"
#include "karekurucu/corpus.hpp"
#include "karekurucu/clueforge.hpp"
#include "karekurucu/gridengine.hpp"
#include "karekurucu/evalkit.hpp"
#include "karekurucu/session.hpp"
#include "karekurucu/service.hpp"
