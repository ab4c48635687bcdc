"""Built-in fact-lookup domains backing the offline synthetic generator.

Every domain describes one lookup tool plus question/phrase templates and
seeded generators for subjects and answers, so whole environments can be
synthesized without any model in the loop.  Entity domains produce proper
nouns that can feed the next hop of a chain; value domains produce terminal
facts (distances, years, counts).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable

from .model import ParameterSpec, ToolDocument, TypeSpec

STR = TypeSpec("string")
BOOL = TypeSpec("boolean")
INT = TypeSpec("integer")
NUM = TypeSpec("number")


def _enum(*options: str) -> TypeSpec:
    return TypeSpec("string", enum_values=tuple(options))


_NAME_PARTS: dict[str, tuple[tuple[str, ...], tuple[str, ...], str]] = {
    # category: (first parts, second parts, joiner)
    "company": (
        ("Orion", "Vertex", "Halcyon", "Meridian", "Cobalt", "Aurora", "Zephyr", "Quantel",
         "Ironwood", "Sable", "Lumen", "Arcadia"),
        ("Logistics", "Dynamics", "Holdings", "Industries", "Systems", "Freight", "Labs", "Works"),
        " ",
    ),
    "city": (
        ("Dusk", "Bright", "Storm", "Iron", "Ash", "Fern", "Gale", "Moss", "Thorn", "Crag",
         "Elder", "Frost"),
        ("vale", "ford", "haven", "moor", "wick", "stead", "field", "mere"),
        "",
    ),
    "person": (
        ("Mira", "Edran", "Sela", "Torvin", "Anya", "Calder", "Ines", "Rowan", "Petra",
         "Silas", "Vera", "Orin"),
        ("Voss", "Mertell", "Kade", "Ambrose", "Falk", "Quillon", "Marsh", "Severin", "Hale",
         "Bryce"),
        " ",
    ),
    "museum": (
        ("Northlight", "Riverside", "Old Harbor", "Stonebridge", "Amberview", "Larkspur",
         "Windmere", "Granite Hill"),
        ("Heritage Museum", "Gallery", "Museum of Craft", "Archive House"),
        " ",
    ),
    "festival": (
        ("Lantern", "Harvest", "Solstice", "Ember", "Tidewater", "Meadow", "Aurora", "Juniper"),
        ("Festival", "Fair", "Carnival", "Gathering"),
        " ",
    ),
    "university": (
        ("Northgate", "Seabright", "Ravenhill", "Oakmont", "Clearwater", "Highfield",
         "Ashworth", "Kingsmere"),
        ("University", "Institute", "College", "Polytechnic"),
        " ",
    ),
    "airline": (
        ("Azure", "Polar", "Crimson", "Atlas", "Monsoon", "Drift", "Summit", "Coral"),
        ("Airways", "Air", "Aviation", "Wings"),
        " ",
    ),
    "airport": (
        ("Kestrel", "Blue Ridge", "Harborview", "Eastwind", "Silver Plain", "Stonegate",
         "Midvale", "Lakeshore"),
        ("International Airport", "Regional Airport", "Airfield"),
        " ",
    ),
    "novel": (
        ("The Silent", "A Winter's", "The Copper", "The Last", "An Evening in", "The Glass",
         "The Wandering", "A Map of"),
        ("Harbor", "Crown", "Orchard", "Meridian", "Lantern", "Tide", "Archive", "Garden"),
        " ",
    ),
    "team": (
        ("Duskvale", "Ironford", "Mosswick", "Galehaven", "Thornmere", "Fernstead",
         "Bridgeport", "Crowford"),
        ("Falcons", "Comets", "Mariners", "Wolves", "Royals", "Harriers"),
        " ",
    ),
    "stadium": (
        ("Ironvale", "Meridian", "Harborlight", "Summit", "Redstone", "Parkside", "Union",
         "Granite"),
        ("Arena", "Stadium", "Grounds", "Dome"),
        " ",
    ),
    "river": (
        ("Silverbend", "Blackwater", "Greymoor", "Thistledown", "Coldbrook", "Amberflow",
         "Reedmarsh", "Youngs"),
        ("River",),
        " ",
    ),
    "region": (
        ("Upper", "Lower", "Western", "Eastern", "Northern", "Greater", "Outer", "Central"),
        ("Highlands", "Basin", "Lowlands", "Plateau", "Marches", "Reach"),
        " ",
    ),
}


def make_name(category: str, rng: random.Random) -> str:
    first, second, joiner = _NAME_PARTS[category]
    return rng.choice(first) + joiner + rng.choice(second)


_VALUE_FACTORIES: dict[str, Callable[[random.Random], str]] = {
    "distance_km": lambda rng: f"{rng.randint(10, 999) / 10:.1f} km",
    "population": lambda rng: str(rng.randint(50_000, 9_999_999)),
    "year": lambda rng: str(rng.randint(1650, 1999)),
    "capacity": lambda rng: str(rng.randint(100, 99_999)),
}


_SUBJECT_NOUNS = {"origin": "location", "organization": "organization", "venue": "venue"}


@dataclass(frozen=True)
class DomainTemplate:
    """One lookup domain: tool interface plus question/answer generators."""

    tool_name: str
    description: str
    parameters: tuple[ParameterSpec, ...]
    subject_param: str
    subject_category: str
    question_tpl: str
    phrase_tpl: str
    answer_category: str | None = None        # entity answers; None means value answer
    value_answer: str | None = None           # key into _VALUE_FACTORIES
    fixed_bindings: tuple[tuple[str, Any], ...] = ()
    extra_subjects: tuple[tuple[str, str], ...] = ()   # (param name, category)
    distractor_only: bool = False

    @property
    def chainable_answer(self) -> bool:
        return self.answer_category is not None

    @property
    def subject_noun(self) -> str:
        return _SUBJECT_NOUNS.get(self.subject_param, self.subject_param)

    def make_subject(self, rng: random.Random) -> str:
        return make_name(self.subject_category, rng)

    def make_answer(self, rng: random.Random) -> str:
        if self.answer_category is not None:
            return make_name(self.answer_category, rng)
        return _VALUE_FACTORIES[self.value_answer](rng)

    def document(self) -> ToolDocument:
        return ToolDocument(name=self.tool_name, description=self.description, parameters=self.parameters)


DOMAINS: tuple[DomainTemplate, ...] = (
    DomainTemplate(
        tool_name="company_headquarters_lookup",
        description="Looks up the city where a registered company keeps its corporate headquarters, drawing on the commercial registry.",
        parameters=(
            ParameterSpec("company", STR, "Registered legal name of the company.", required=True),
            ParameterSpec("registry_edition", _enum("current", "archive"), "Registry edition to consult. Default is 'current'.", default="current"),
        ),
        subject_param="company",
        subject_category="company",
        answer_category="city",
        question_tpl="Which city hosts the corporate headquarters of {inner}?",
        phrase_tpl="the headquarters city of {inner}",
    ),
    DomainTemplate(
        tool_name="city_mayor_lookup",
        description="Returns the currently registered mayor of a city from the civic directory.",
        parameters=(
            ParameterSpec("city", STR, "Name of the city to look up.", required=True),
            ParameterSpec("include_title", BOOL, "Whether to prefix the honorific title. Default is false.", default=False),
        ),
        subject_param="city",
        subject_category="city",
        answer_category="person",
        question_tpl="Who is the registered mayor of {inner}?",
        phrase_tpl="the mayor of {inner}",
    ),
    DomainTemplate(
        tool_name="museum_curator_lookup",
        description="Finds the chief curator responsible for a museum's permanent collection.",
        parameters=(
            ParameterSpec("museum", STR, "Official museum name.", required=True),
        ),
        subject_param="museum",
        subject_category="museum",
        answer_category="person",
        question_tpl="Who serves as chief curator of {inner}?",
        phrase_tpl="the chief curator of {inner}",
    ),
    DomainTemplate(
        tool_name="festival_host_city_lookup",
        description="Identifies the city that hosts a recurring festival, according to the events register.",
        parameters=(
            ParameterSpec("festival", STR, "Name of the festival.", required=True),
            ParameterSpec("season", _enum("spring", "summer", "autumn", "winter"), "Season filter for recurring events. Default is 'summer'.", default="summer"),
        ),
        subject_param="festival",
        subject_category="festival",
        answer_category="city",
        question_tpl="Which city hosts {inner}?",
        phrase_tpl="the host city of {inner}",
    ),
    DomainTemplate(
        tool_name="university_chancellor_lookup",
        description="Retrieves the sitting chancellor of a university from the academic directory.",
        parameters=(
            ParameterSpec("university", STR, "Official university name.", required=True),
        ),
        subject_param="university",
        subject_category="university",
        answer_category="person",
        question_tpl="Who is the chancellor of {inner}?",
        phrase_tpl="the chancellor of {inner}",
    ),
    DomainTemplate(
        tool_name="airline_hub_lookup",
        description="Reports the primary hub airport of an airline.",
        parameters=(
            ParameterSpec("airline", STR, "Airline trading name.", required=True),
        ),
        subject_param="airline",
        subject_category="airline",
        answer_category="airport",
        question_tpl="What is the primary hub airport of {inner}?",
        phrase_tpl="the primary hub airport of {inner}",
    ),
    DomainTemplate(
        tool_name="novel_author_lookup",
        description="Looks up the author of a published novel in the catalogue of record.",
        parameters=(
            ParameterSpec("novel", STR, "Exact title of the novel.", required=True),
        ),
        subject_param="novel",
        subject_category="novel",
        answer_category="person",
        question_tpl="Who wrote {inner}?",
        phrase_tpl="the author of {inner}",
    ),
    DomainTemplate(
        tool_name="team_home_stadium_lookup",
        description="Returns the stadium where a sports team plays its home fixtures.",
        parameters=(
            ParameterSpec("team", STR, "Full team name.", required=True),
        ),
        subject_param="team",
        subject_category="team",
        answer_category="stadium",
        question_tpl="At which stadium does {inner} play home fixtures?",
        phrase_tpl="the home stadium of {inner}",
    ),
    DomainTemplate(
        tool_name="river_source_region_lookup",
        description="Identifies the geographic region where a river rises.",
        parameters=(
            ParameterSpec("river", STR, "Name of the river.", required=True),
        ),
        subject_param="river",
        subject_category="river",
        answer_category="region",
        question_tpl="In which region does {inner} rise?",
        phrase_tpl="the source region of {inner}",
    ),
    DomainTemplate(
        tool_name="person_birth_city_lookup",
        description="Finds the recorded birth city of a public figure.",
        parameters=(
            ParameterSpec("person", STR, "Full name of the person.", required=True),
        ),
        subject_param="person",
        subject_category="person",
        answer_category="city",
        question_tpl="In which city was {inner} born?",
        phrase_tpl="the birth city of {inner}",
    ),
    DomainTemplate(
        tool_name="distance_calculator",
        description="A versatile tool to calculate distances between two locations for various modes of transportation (e.g., walking, biking, driving). It provides route-based distances and adjusts for real-world conditions such as road types and traffic.",
        parameters=(
            ParameterSpec("origin", STR, "Starting point address or coordinates for the distance calculation.", required=True),
            ParameterSpec("destination", STR, "Ending point address or coordinates for the distance calculation.", required=True),
            ParameterSpec("mode", _enum("walking", "biking", "driving", "public_transport"), "Mode of transportation to calculate the distance for. Options include 'walking', 'biking', 'driving', etc.", required=True),
            ParameterSpec("route_preference", _enum("shortest", "fastest", "scenic", "avoid_tolls"), "Preferred route type (e.g., shortest, fastest, scenic, etc.). Default is 'shortest'.", default="shortest"),
            ParameterSpec("unit", _enum("km", "miles", "meters"), "Unit of distance to return. Can be 'km', 'miles', or 'meters'. Default is 'km'.", default="km"),
            ParameterSpec("avoid_tolls", BOOL, "Indicates whether to avoid toll roads. Default is false.", default=False),
        ),
        subject_param="origin",
        subject_category="city",
        value_answer="distance_km",
        question_tpl="What is the walking distance (km) from {inner} to {destination}?",
        phrase_tpl="the walking distance (km) from {inner} to {destination}",
        fixed_bindings=(("mode", "walking"),),
        extra_subjects=(("destination", "city"),),
    ),
    DomainTemplate(
        tool_name="city_population_lookup",
        description="Reports the registered resident population of a city.",
        parameters=(
            ParameterSpec("city", STR, "Name of the city.", required=True),
            ParameterSpec("census_year", INT, "Census year to consult; latest census when omitted."),
        ),
        subject_param="city",
        subject_category="city",
        value_answer="population",
        question_tpl="What is the registered population of {inner}?",
        phrase_tpl="the registered population of {inner}",
    ),
    DomainTemplate(
        tool_name="founding_year_lookup",
        description="Returns the founding year of an organization or institution.",
        parameters=(
            ParameterSpec("organization", STR, "Name of the organization.", required=True),
            ParameterSpec("source", STR, "Preferred source register."),
        ),
        subject_param="organization",
        subject_category="university",
        value_answer="year",
        question_tpl="In which year was {inner} founded?",
        phrase_tpl="the founding year of {inner}",
    ),
    DomainTemplate(
        tool_name="seating_capacity_lookup",
        description="Looks up the certified seating capacity of a venue.",
        parameters=(
            ParameterSpec("venue", STR, "Official venue name.", required=True),
            ParameterSpec("configuration", _enum("standard", "expanded"), "Seating configuration. Default is 'standard'.", default="standard"),
        ),
        subject_param="venue",
        subject_category="stadium",
        value_answer="capacity",
        question_tpl="What is the certified seating capacity of {inner}?",
        phrase_tpl="the seating capacity of {inner}",
    ),
    # Distractor-only domains: callable, validated, never mapped to a sub-question.
    DomainTemplate(
        tool_name="weather_snapshot_service",
        description="Provides a current weather snapshot for a location.",
        parameters=(
            ParameterSpec("location", STR, "Place name or coordinates.", required=True),
            ParameterSpec("units", _enum("metric", "imperial"), "Unit system. Default is 'metric'.", default="metric"),
        ),
        subject_param="location",
        subject_category="city",
        value_answer="capacity",
        question_tpl="What is the weather at {inner}?",
        phrase_tpl="the weather at {inner}",
        distractor_only=True,
    ),
    DomainTemplate(
        tool_name="currency_rate_board",
        description="Quotes the indicative exchange rate between two currencies.",
        parameters=(
            ParameterSpec("base_currency", STR, "ISO code of the base currency.", required=True),
            ParameterSpec("quote_currency", STR, "ISO code of the quote currency.", required=True),
        ),
        subject_param="base_currency",
        subject_category="city",
        value_answer="capacity",
        question_tpl="What is the exchange rate for {inner}?",
        phrase_tpl="the exchange rate for {inner}",
        distractor_only=True,
    ),
    DomainTemplate(
        tool_name="visa_requirement_checker",
        description="Checks whether citizens of one country need a visa to enter another.",
        parameters=(
            ParameterSpec("nationality", STR, "Nationality of the traveller.", required=True),
            ParameterSpec("destination_country", STR, "Country being visited.", required=True),
        ),
        subject_param="nationality",
        subject_category="region",
        value_answer="capacity",
        question_tpl="Do citizens of {inner} need a visa?",
        phrase_tpl="the visa requirement for {inner}",
        distractor_only=True,
    ),
    DomainTemplate(
        tool_name="public_holiday_calendar",
        description="Lists public holidays for a country and year.",
        parameters=(
            ParameterSpec("country", STR, "Country to query.", required=True),
            ParameterSpec("year", INT, "Four-digit year; current year when omitted."),
        ),
        subject_param="country",
        subject_category="region",
        value_answer="year",
        question_tpl="Which public holidays fall in {inner}?",
        phrase_tpl="the public holidays of {inner}",
        distractor_only=True,
    ),
    DomainTemplate(
        tool_name="shipping_cost_estimator",
        description="Estimates freight cost between two ports for a given weight.",
        parameters=(
            ParameterSpec("origin_port", STR, "Port of departure.", required=True),
            ParameterSpec("destination_port", STR, "Port of arrival.", required=True),
            ParameterSpec("weight_kg", NUM, "Shipment weight in kilograms.", required=True),
        ),
        subject_param="origin_port",
        subject_category="city",
        value_answer="capacity",
        question_tpl="What does shipping from {inner} cost?",
        phrase_tpl="the shipping cost from {inner}",
        distractor_only=True,
    ),
    DomainTemplate(
        tool_name="air_quality_index_service",
        description="Reports the current air quality index for a city.",
        parameters=(
            ParameterSpec("city", STR, "City to query.", required=True),
        ),
        subject_param="city",
        subject_category="city",
        value_answer="capacity",
        question_tpl="What is the air quality index in {inner}?",
        phrase_tpl="the air quality index of {inner}",
        distractor_only=True,
    ),
)

QUESTION_DOMAINS: tuple[DomainTemplate, ...] = tuple(d for d in DOMAINS if not d.distractor_only)
ENTITY_DOMAINS: tuple[DomainTemplate, ...] = tuple(d for d in QUESTION_DOMAINS if d.chainable_answer)

_BY_NAME = {d.tool_name: d for d in DOMAINS}


def domain_by_name(tool_name: str) -> DomainTemplate:
    return _BY_NAME[tool_name]


@dataclass
class DistractorCatalog:
    """Pool of callable tools available for toolset extension."""

    templates: tuple[DomainTemplate, ...] = field(default_factory=tuple)

    @classmethod
    def default(cls, exclude_names: set[str] = frozenset()) -> "DistractorCatalog":
        pool = tuple(d for d in DOMAINS if d.tool_name not in exclude_names)
        return cls(templates=pool)

    def available(self, exclude_names: set[str]) -> list[DomainTemplate]:
        return [d for d in self.templates if d.tool_name not in exclude_names]
