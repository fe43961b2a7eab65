import pytest

from evseq import (
    Argument,
    EventRecord,
    EventSchema,
    Mention,
    TokenizedInput,
    parse_schema,
)

FIG_SENTENCE = (
    "The man returned to Los Angeles from Mexico following his capture "
    "Tuesday by bounty hunters ."
)

# test_acceptance appends its PASS/FAIL lines here; replayed after the
# run so they stay visible even when pytest captures stdout.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

# The worked two-event example used throughout: a Transport event on
# "returned" and an Arrest-Jail event on "capture".
FIG_SEQ = (
    "( ( Transport returned ( Artifact The man ) ( Destination Los Angeles ) "
    "( Origin Mexico ) ) ( Arrest Jail capture ( Person The man ) "
    "( Time Tuesday ) ( Agent bounty hunters ) ) )"
).split()


@pytest.fixture(scope="session")
def fig_schema() -> EventSchema:
    return parse_schema(
        """
        Transport: Artifact, Origin, Destination
        Arrest-Jail: Person, Agent, Time
        """
    )


@pytest.fixture(scope="session")
def fig_input() -> TokenizedInput:
    return TokenizedInput.from_text(FIG_SENTENCE)


@pytest.fixture(scope="session")
def fig_records() -> list[EventRecord]:
    return [
        EventRecord(
            "Transport",
            Mention("returned", 2),
            (
                Argument("Artifact", Mention("The man", 0)),
                Argument("Destination", Mention("Los Angeles", 4)),
                Argument("Origin", Mention("Mexico", 7)),
            ),
        ),
        EventRecord(
            "Arrest-Jail",
            Mention("capture", 10),
            (
                Argument("Person", Mention("The man", 0)),
                Argument("Time", Mention("Tuesday", 11)),
                Argument("Agent", Mention("bounty hunters", 13)),
            ),
        ),
    ]


@pytest.fixture(scope="session")
def fig_seq() -> tuple[str, ...]:
    return tuple(FIG_SEQ)


@pytest.fixture(scope="session")
def tiny_schema() -> EventSchema:
    """One type, no roles.  The smallest schema the decoder accepts."""
    return EventSchema({"T": ()})


@pytest.fixture(scope="session")
def transfer_schema() -> EventSchema:
    """Two types sharing the label prefix "Transfer"."""
    return parse_schema(
        """
        Transfer-Ownership: Buyer, Seller, Artifact
        Transfer-Money: Giver, Recipient
        """
    )
