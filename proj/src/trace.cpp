namespace besov {}
